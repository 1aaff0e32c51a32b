#include "pdefix/builtins.hpp"

#include <cmath>

#include "pdefix/errors.hpp"

namespace pdefix {

namespace {

constexpr std::string_view kHeat1d = R"(# u_t - u_xx = 0, single decaying mode
kind: evolution
dim: 1
components: 1
domain: 6.283185307179586
grid: 16
constraint: none
equation[0]: -1*D(2)u[0] = 0
initial[0]: sin(1*x1)
t_final: 1
dt: 0.1
)";

// Manufactured: u* = sin(x1) gives f = 2 sin(x1) + 0.1 sin(x1)^3.
constexpr std::string_view kCubic1d = R"(kind: stationary
dim: 1
components: 1
domain: 6.283185307179586
grid: 32
constraint: none
equation[0]: -1*D(2)u[0] + 1*u[0] + 0.1*u[0]*u[0]*u[0] = f[0]
forcing[0]: 2*sin(1*x1) + 0.1*sin(1*x1)*sin(1*x1)*sin(1*x1)
)";

// Stationary viscous Burgers with a mass term so mode 0 is invertible.
constexpr std::string_view kBurgers1d = R"(kind: stationary
dim: 1
components: 1
domain: 6.283185307179586
grid: 16
constraint: none
equation[0]: u[0]*D(1)u[0] + -0.1*D(2)u[0] + 1*u[0] = f[0]
forcing[0]: 0.5*sin(1*x1)
)";

constexpr std::string_view kBurgers1dEvolution = R"(kind: evolution
dim: 1
components: 1
domain: 6.283185307179586
grid: 32
constraint: none
equation[0]: u[0]*D(1)u[0] + -0.1*D(2)u[0] = 0
initial[0]: sin(1*x1)
t_final: 1
dt: 0.01
)";

// Incompressible Navier-Stokes, nu = 0.1; pressure is carried by the Leray
// projection.
constexpr std::string_view kTaylorGreen2d = R"(kind: evolution
dim: 2
components: 2
domain: 6.283185307179586 6.283185307179586
grid: 32 32
constraint: leray
equation[0]: u[0]*D(1,0)u[0] + u[1]*D(0,1)u[0] + -0.1*D(2,0)u[0] + -0.1*D(0,2)u[0] = 0
equation[1]: u[0]*D(1,0)u[1] + u[1]*D(0,1)u[1] + -0.1*D(2,0)u[1] + -0.1*D(0,2)u[1] = 0
initial[0]: cos(1*x1)*sin(1*x2)
initial[1]: -1*sin(1*x1)*cos(1*x2)
t_final: 1
dt: 0.01
)";

constexpr double kTaylorGreenViscosity = 0.1;

}  // namespace

std::vector<std::string> builtin_names() {
  return {"heat1d", "cubic1d", "burgers1d", "burgers1d-evolution", "taylor-green-2d"};
}

BuiltinProblem builtin_problem(std::string_view name) {
  BuiltinProblem b;
  b.name = std::string(name);
  if (name == "heat1d") {
    b.text = kHeat1d;
    b.exact = [](const Grid& g, double t) {
      return SpectralField::sample(g, 1, [t](int, std::span<const double> x) {
        return std::sin(x[0]) * std::exp(-t);
      });
    };
  } else if (name == "cubic1d") {
    b.text = kCubic1d;
    b.exact = [](const Grid& g, double) {
      return SpectralField::sample(g, 1, [](int, std::span<const double> x) { return std::sin(x[0]); });
    };
  } else if (name == "burgers1d") {
    b.text = kBurgers1d;
  } else if (name == "burgers1d-evolution") {
    b.text = kBurgers1dEvolution;
  } else if (name == "taylor-green-2d") {
    b.text = kTaylorGreen2d;
    b.exact = [](const Grid& g, double t) {
      const double decay = std::exp(-2.0 * kTaylorGreenViscosity * t);
      return SpectralField::sample(g, 2, [decay](int c, std::span<const double> x) {
        return c == 0 ? std::cos(x[0]) * std::sin(x[1]) * decay : -std::sin(x[0]) * std::cos(x[1]) * decay;
      });
    };
  } else {
    throw Error(ErrorCode::UnknownProblem, "'" + std::string(name) + "'");
  }
  b.spec = parse_problem(b.text);
  return b;
}

}  // namespace pdefix
