#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pdefix/builtins.hpp"
#include "pdefix/errors.hpp"
#include "pdefix/picard.hpp"
#include "pdefix/verifier.hpp"
#include "test_support.hpp"

using namespace pdefix;
using namespace pdefix::testing;

namespace {

std::string stationary_1d(int grid, const std::string& equation, const std::string& forcing) {
  return "kind: stationary\ndim: 1\ncomponents: 1\ndomain: 6.283185307179586\ngrid: " +
         std::to_string(grid) + "\nequation[0]: " + equation + "\nforcing[0]: " + forcing + "\n";
}

SpectralField sine(const Grid& g) {
  return SpectralField::sample(g, 1, [](int, std::span<const double> x) { return std::sin(x[0]); });
}

}  // namespace

TEST(DifferentialResidual, ManufacturedCubicAtExactSolution) {
  const auto spec = builtin_problem("cubic1d").spec;
  const auto report = differential_residual(spec, sine(spec.grid));
  EXPECT_LE(report.overall_max, 1e-10);
  ASSERT_EQ(report.linf.size(), 1u);
  EXPECT_EQ(report.overall_max, report.linf[0]);
  EXPECT_GE(report.l2[0], 0.0);
}

TEST(DifferentialResidual, ZeroFieldZeroForcing) {
  const auto spec = parse_problem(stationary_1d(16, "-1*D(2)u[0] + u[0]*D(1)u[0] + u[0] = f[0]", "0"));
  const auto report = differential_residual(spec, SpectralField::zeros(spec.grid, 1));
  EXPECT_EQ(report.overall_max, 0.0);
  EXPECT_EQ(report.l2[0], 0.0);
}

TEST(DifferentialResidual, LinearProblemAtInverse) {
  const auto spec = parse_problem(slurp(std::filesystem::path(PDEFIX_CORPUS_DIR) / "05_transport.pde"));
  const FixedPointMap map(spec);
  const auto u = map.solve_linear(evaluate_forcing(spec));
  EXPECT_LE(differential_residual(spec, u).overall_max, 1e-11);
}

TEST(DifferentialResidual, OverallIsMaxOverEquations) {
  const auto spec = parse_problem(slurp(std::filesystem::path(PDEFIX_CORPUS_DIR) / "11_coupled.pde"));
  std::mt19937_64 rng(2);
  const auto report = differential_residual(spec, random_smooth_field(rng, spec.grid, 2));
  ASSERT_EQ(report.linf.size(), 2u);
  EXPECT_EQ(report.overall_max, std::max(report.linf[0], report.linf[1]));
}

TEST(DifferentialResidual, EvolutionRejected) {
  const auto spec = builtin_problem("heat1d").spec;
  EXPECT_EQ(thrown_code([&] { differential_residual(spec, SpectralField::zeros(spec.grid, 1)); }),
            ErrorCode::InvalidArgument);
}

TEST(DifferentialResidual, Linearity) {
  const auto spec = parse_problem(slurp(std::filesystem::path(PDEFIX_CORPUS_DIR) / "04_poisson2d.pde"));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_physical_field(rng, spec.grid, 1);
    const auto delta = random_physical_field(rng, spec.grid, 1);
    const auto lhs = residual_field(spec, u + delta);
    const auto rhs = residual_field(spec, u) + apply_linear(spec.split.linear, delta);
    EXPECT_LE(linf(lhs - rhs), 1e-12 * (1 + linf(lhs)));
  }
}

TEST(Oracle, LinearSpecMatchesInversion) {
  const auto spec = parse_problem(stationary_1d(32, "-1*D(2)u[0] + 0.5*D(1)u[0] + 2*u[0] = f[0]",
                                                "sin(1*x1) + 0.3*cos(4*x1) + 0.1"));
  const auto oracle = oracle_newton(spec);
  const FixedPointMap map(spec);
  const auto direct = map.solve_linear(evaluate_forcing(spec));
  EXPECT_LE(compare_fields(oracle, direct).linf, 1e-10);
}

TEST(Oracle, ManufacturedCubicGrid16) {
  const auto spec = with_grid(builtin_problem("cubic1d").spec, periodic_grid({16}));
  const auto oracle = oracle_newton(spec);
  EXPECT_LE(compare_fields(oracle, sine(spec.grid)).linf, 1e-9);
}

TEST(Oracle, BurgersAgreesWithPicard) {
  const auto spec = builtin_problem("burgers1d").spec;
  ASSERT_EQ(spec.grid.points(0), 16);
  const auto oracle = oracle_newton(spec);
  SolverOptions opts;
  opts.tol = 1e-12;
  const auto picard = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts).solution;
  EXPECT_LE(compare_fields(oracle, picard).linf, 1e-8);
}

TEST(Oracle, AgreesWithPicardOnContractiveBuiltins) {
  for (const auto& name : builtin_names()) {
    const auto bp = builtin_problem(name);
    if (bp.spec.kind != ProblemKind::Stationary) continue;
    if (bp.spec.grid.size() * bp.spec.components > 64) continue;
    const auto oracle = oracle_newton(bp.spec);
    const auto picard = picard_solve(bp.spec, SpectralField::zeros(bp.spec.grid, bp.spec.components)).solution;
    EXPECT_LE(compare_fields(picard, oracle).relative_l2, 1e-8) << name;
  }
}

TEST(Oracle, TwoDimensionalCoupledSystem) {
  const auto spec = parse_problem(
      "kind: stationary\ndim: 2\ncomponents: 1\ndomain: 6.283185307179586 6.283185307179586\ngrid: 8 8\n"
      "equation[0]: -1*D(2,0)u[0] - D(0,2)u[0] + 2*u[0] + 0.2*u[0]*D(1,0)u[0] = f[0]\n"
      "forcing[0]: sin(1*x1)*cos(1*x2)\n");
  const auto oracle = oracle_newton(spec);
  SolverOptions opts;
  opts.tol = 1e-12;
  const auto picard = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts).solution;
  EXPECT_LE(compare_fields(oracle, picard).linf, 1e-9);
  EXPECT_LE(differential_residual(spec, oracle).overall_max, 1e-10);
}

TEST(Oracle, TooManyUnknowns) {
  const auto spec = builtin_problem("cubic1d").spec;
  const auto big = with_grid(spec, periodic_grid({128}));
  EXPECT_EQ(thrown_code([&] { oracle_newton(big); }), ErrorCode::TooManyUnknowns);
  OracleOptions opts;
  opts.max_unknowns = 16;
  EXPECT_EQ(thrown_code([&] { oracle_newton(spec, opts); }), ErrorCode::TooManyUnknowns);
}

TEST(Oracle, NonConvergenceWhenStepsRunOut) {
  const auto spec = builtin_problem("burgers1d").spec;
  OracleOptions opts;
  opts.max_newton_steps = 1;
  EXPECT_EQ(thrown_code([&] { oracle_newton(spec, opts); }), ErrorCode::OracleNonConvergence);
}

TEST(CompareFields, Identical) {
  std::mt19937_64 rng(31);
  const auto a = random_physical_field(rng, periodic_grid({16}), 2);
  const auto d = compare_fields(a, a);
  EXPECT_EQ(d.linf, 0.0);
  EXPECT_EQ(d.relative_l2, 0.0);
}

TEST(CompareFields, ConstantOffset) {
  std::mt19937_64 rng(37);
  const Grid g = periodic_grid({16});
  const auto b = SpectralField::zeros(g, 1);
  const auto a = SpectralField::from_physical(g, 1, std::vector<double>(g.size(), 1e-6));
  const auto d = compare_fields(a, b);
  EXPECT_DOUBLE_EQ(d.linf, 1e-6);
  EXPECT_DOUBLE_EQ(d.relative_l2, 1e-6 * std::sqrt(kTwoPi));
  const auto c = random_physical_field(rng, g, 1);
  EXPECT_NEAR(compare_fields(c + a, c).linf, 1e-6, 1e-15);
}

TEST(CompareFields, ShapeMismatch) {
  EXPECT_EQ(thrown_code([] {
              compare_fields(SpectralField::zeros(periodic_grid({16}), 1), SpectralField::zeros(periodic_grid({16}), 2));
            }),
            ErrorCode::ShapeMismatch);
  EXPECT_EQ(thrown_code([] {
              compare_fields(SpectralField::zeros(periodic_grid({16}), 1), SpectralField::zeros(periodic_grid({8}), 1));
            }),
            ErrorCode::ShapeMismatch);
}
