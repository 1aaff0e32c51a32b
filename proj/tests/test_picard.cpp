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

SpectralField sine(const Grid& g, double freq = 1.0, double amp = 1.0) {
  return SpectralField::sample(g, 1, [=](int, std::span<const double> x) { return amp * std::sin(freq * x[0]); });
}

ConvergenceTrace trace_of(std::vector<double> updates) {
  ConvergenceTrace t;
  for (std::size_t m = 0; m < updates.size(); ++m) {
    IterationRecord r;
    r.iteration = static_cast<int>(m);
    r.update_norm = updates[m];
    if (m > 0) r.contraction = updates[m] / updates[m - 1];
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  for (double theta : {0.0, -0.5, 1.5}) {
    o = {};
    o.damping = theta;
    EXPECT_EQ(thrown_code([&] { o.validate(); }), ErrorCode::InvalidArgument) << theta;
  }
  o = {};
  o.tol = 0.0;
  EXPECT_EQ(thrown_code([&] { o.validate(); }), ErrorCode::InvalidArgument);
  o = {};
  o.max_iter = 0;
  EXPECT_EQ(thrown_code([&] { o.validate(); }), ErrorCode::InvalidArgument);
}

TEST(ModifiedForcing, LinearSystemReturnsForcing) {
  const auto spec = parse_problem(stationary_1d(16, "-1*D(2)u[0] + u[0] = f[0]", "sin(1*x1) + 0.5"));
  std::mt19937_64 rng(1);
  const auto u = random_physical_field(rng, spec.grid, 1);
  const auto out = modified_forcing(spec, u);
  EXPECT_EQ(max_abs_diff(out.physical(), evaluate_forcing(spec).physical()), 0.0);
}

TEST(ModifiedForcing, CubicAtZeroReturnsForcing) {
  const auto spec = parse_problem(stationary_1d(32, "-1*D(2)u[0] + u[0]*u[0]*u[0] = f[0]", "2*sin(1*x1)"));
  const auto out = modified_forcing(spec, SpectralField::zeros(spec.grid, 1));
  EXPECT_LE(max_abs_diff(out.physical(), evaluate_forcing(spec).physical()), 1e-15);
}

TEST(ModifiedForcing, AdvectionOfSine) {
  const auto spec = parse_problem(stationary_1d(32, "u[0]*D(1)u[0] + -0.1*D(2)u[0] = f[0]", "0"));
  const auto out = modified_forcing(spec, sine(spec.grid));
  EXPECT_LE(max_abs_diff(out.physical(), sine(spec.grid, 2.0, -0.5).physical()), 1e-12);
}

TEST(ModifiedForcing, MapAgreesWithFreeFunctionAndIsFreshAfterStep) {
  const auto spec = builtin_problem("burgers1d").spec;
  const FixedPointMap map(spec);
  IterationState state;
  state.current = sine(spec.grid, 1.0, 0.3);
  picard_step(map, state, {});
  picard_step(map, state, {});
  // state.modified_forcing was computed from the iterate before the last step
  const auto fresh = modified_forcing(spec, state.previous);
  EXPECT_LE(max_abs_diff(state.modified_forcing.physical(), fresh.physical()), 1e-12);
}

TEST(PicardSolve, LinearProblemCollapsesAtIterationOne) {
  const auto spec = parse_problem(stationary_1d(32, "-1*D(2)u[0] + 2*u[0] = f[0]", "sin(1*x1) + cos(3*x1)"));
  const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1));
  ASSERT_EQ(result.trace.size(), 2u);
  EXPECT_LE(result.trace.records[1].update_norm, 1e-12);
  const FixedPointMap map(spec);
  const auto direct = invert_stationary(map.symbol(), evaluate_forcing(spec));
  EXPECT_LE(max_abs_diff(result.solution.physical(), direct.physical()), 1e-14);
  EXPECT_FALSE(result.trace.records[0].contraction.has_value());
}

TEST(PicardSolve, ManufacturedCubic) {
  const auto spec = parse_problem(stationary_1d(
      32, "-1*D(2)u[0] + u[0] + 0.1*u[0]*u[0]*u[0] = f[0]",
      "2*sin(1*x1) + 0.1*sin(1*x1)*sin(1*x1)*sin(1*x1)"));
  SolverOptions opts;
  opts.tol = 1e-12;
  const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts);
  EXPECT_LE(max_abs_diff(result.solution.physical(), sine(spec.grid).physical()), 1e-10);
  EXPECT_LE(differential_residual(spec, result.solution).overall_max, 100 * opts.tol * 3.0);
}

TEST(PicardSolve, StrongBurgersForcingIsFlagged) {
  const auto spec = parse_problem(stationary_1d(16, "u[0]*D(1)u[0] - 0.1*D(2)u[0] + u[0] = f[0]", "50*sin(1*x1)"));
  const auto code = thrown_code([&] { picard_solve(spec, SpectralField::zeros(spec.grid, 1)); });
  ASSERT_TRUE(code.has_value());
  EXPECT_TRUE(*code == ErrorCode::DivergenceDetected || *code == ErrorCode::MaxIterExceeded);

  const auto scaled_builtin = with_forcing_scale(builtin_problem("burgers1d").spec, 100.0);
  const auto code2 = thrown_code([&] { picard_solve(scaled_builtin, SpectralField::zeros(spec.grid, 1)); });
  ASSERT_TRUE(code2.has_value());
  EXPECT_TRUE(*code2 == ErrorCode::DivergenceDetected || *code2 == ErrorCode::MaxIterExceeded);
}

TEST(PicardSolve, MaxIterExceeded) {
  const auto spec = builtin_problem("burgers1d").spec;
  SolverOptions opts;
  opts.max_iter = 3;
  EXPECT_EQ(thrown_code([&] { picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts); }),
            ErrorCode::MaxIterExceeded);
}

TEST(PicardSolve, ShapeMismatch) {
  const auto spec = builtin_problem("cubic1d").spec;
  EXPECT_EQ(thrown_code([&] { picard_solve(spec, SpectralField::zeros(periodic_grid({16}), 1)); }),
            ErrorCode::ShapeMismatch);
}

TEST(PicardSolve, SingularModePropagates) {
  const auto spec = parse_problem(stationary_1d(16, "-1*D(2)u[0] + 0.1*u[0]*u[0] = f[0]", "sin(1*x1) + 1"));
  EXPECT_EQ(thrown_code([&] { picard_solve(spec, SpectralField::zeros(spec.grid, 1)); }),
            ErrorCode::ZeroModeSingular);
}

TEST(EstimateContraction, GeometricSequence) {
  EXPECT_DOUBLE_EQ(*estimate_contraction(trace_of({1, 0.5, 0.25, 0.125})), 0.5);
}

TEST(EstimateContraction, Stagnation) {
  EXPECT_DOUBLE_EQ(*estimate_contraction(trace_of({1, 1, 1, 1})), 1.0);
}

TEST(EstimateContraction, UsesLastFiveRatios) {
  // ratios 10, 10 then five ratios of 0.2
  const auto t = trace_of({1, 10, 100, 20, 4, 0.8, 0.16, 0.032});
  EXPECT_NEAR(*estimate_contraction(t), 0.2, 1e-14);
}

TEST(EstimateContraction, InsufficientData) {
  EXPECT_EQ(thrown_code([] { estimate_contraction(trace_of({1, 0.5})); }), ErrorCode::InsufficientData);
  EXPECT_EQ(thrown_code([] { estimate_contraction(trace_of({})); }), ErrorCode::InsufficientData);
}

TEST(EstimateContraction, DampedMassProblemContractsByOneMinusTheta) {
  // L = identity, no nonlinearity: u <- 0.3 u + 0.7 f, so every ratio is 0.3.
  const auto spec = parse_problem(stationary_1d(16, "u[0] = f[0]", "sin(1*x1) + 0.25*cos(2*x1)"));
  SolverOptions opts;
  opts.damping = 0.7;
  opts.tol = 1e-4;
  const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts);
  ASSERT_GE(result.trace.size(), 5u);
  EXPECT_NEAR(*estimate_contraction(result.trace), 0.3, 1e-10);
}

TEST(EstimateContraction, AffineNonlinearPart) {
  // The parenthesised factor keeps -0.3*u in the nonlinear part: Phi(u) = f + 0.3 u.
  const auto spec = parse_problem(stationary_1d(16, "u[0] - 0.3*(u[0] + 0) = f[0]", "sin(1*x1)"));
  ASSERT_TRUE(spec.split.has_nonlinear_terms());
  SolverOptions opts;
  opts.tol = 1e-5;
  const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts);
  EXPECT_NEAR(*estimate_contraction(result.trace), 0.3, 1e-10);
  EXPECT_LE(max_abs_diff(result.solution.physical(), sine(spec.grid, 1.0, 1 / 0.7).physical()), 1e-4);
}

TEST(PicardProperties, FixedPointConsistency) {
  for (const char* name : {"cubic1d", "burgers1d"}) {
    const auto spec = builtin_problem(name).spec;
    const SolverOptions opts;
    const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts);
    const FixedPointMap map(spec);
    const auto& u = result.solution;
    EXPECT_LE(norm(u - map(u), opts.norm), opts.tol * (1 + norm(u, opts.norm))) << name;
  }
}

TEST(PicardProperties, DampingEquivalenceOnLinearProblem) {
  const auto spec = parse_problem(
      "kind: stationary\ndim: 2\ncomponents: 2\ndomain: 6.283185307179586 6.283185307179586\n"
      "grid: 16 8\nequation[0]: -1*D(2,0)u[0] - D(0,2)u[0] + u[0] + 0.5*D(1,0)u[1] = f[0]\n"
      "equation[1]: 2*u[1] - 0.5*D(1,0)u[0] = f[1]\nforcing[0]: sin(1*x1)*cos(2*x2)\nforcing[1]: cos(3*x1)\n");
  // At theta = 0.1 the update ratio is 0.9, so the stopping rule alone leaves
  // an error of about 9 * tol; tol 1e-12 keeps that well inside 1e-10.
  const auto reference = picard_solve(spec, SpectralField::zeros(spec.grid, 2)).solution;
  for (double theta : {0.1, 0.35, 0.6, 0.9, 1.0}) {
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.damping = theta;
    opts.max_iter = 2000;
    const auto u = picard_solve(spec, SpectralField::zeros(spec.grid, 2), opts).solution;
    EXPECT_LE(linf(u - reference), 1e-10) << theta;
  }
}

TEST(PicardProperties, MonotoneTail) {
  for (const char* name : {"cubic1d", "burgers1d"}) {
    const auto spec = builtin_problem(name).spec;
    const SolverOptions opts;
    const auto trace = picard_solve(spec, SpectralField::zeros(spec.grid, 1), opts).trace;
    ASSERT_GE(trace.size(), static_cast<std::size_t>(opts.divergence_window)) << name;
    for (std::size_t m = trace.size() - opts.divergence_window + 1; m < trace.size(); ++m) {
      EXPECT_LE(trace.records[m].update_norm, trace.records[m - 1].update_norm * (1 + 1e-6)) << name << " " << m;
    }
  }
}

TEST(PicardProperties, ResidualRecordedPerIteration) {
  const auto spec = builtin_problem("cubic1d").spec;
  const auto result = picard_solve(spec, SpectralField::zeros(spec.grid, 1));
  for (std::size_t m = 0; m < result.trace.size(); ++m) {
    EXPECT_EQ(result.trace.records[m].iteration, static_cast<int>(m));
    EXPECT_GE(result.trace.records[m].residual_norm, 0.0);
    EXPECT_EQ(result.trace.records[m].contraction.has_value(), m > 0);
  }
  EXPECT_NEAR(result.trace.back().residual_norm, differential_residual(spec, result.solution).overall_max, 1e-15);
}

TEST(Evolution, EnergyDecay) {
  for (const char* name : {"heat1d", "burgers1d-evolution", "taylor-green-2d"}) {
    const auto spec = builtin_problem(name).spec;
    double last = norm(project(ConstraintProjector(spec.constraint, spec.grid, spec.components),
                               default_initial_iterate(spec)),
                       NormKind::L2);
    int slabs = 0;
    picard_solve(spec, default_initial_iterate(spec), {}, [&](int, double, const SpectralField& u) {
      const double e = norm(u, NormKind::L2);
      EXPECT_LE(e, last + 1e-12) << name << " slab " << slabs;
      last = e;
      ++slabs;
    });
    EXPECT_EQ(slabs, static_cast<int>(std::lround(spec.t_final / spec.dt))) << name;
  }
}

TEST(Evolution, HeatMatchesExactDecay) {
  const auto bp = builtin_problem("heat1d");
  const auto result = picard_solve(bp.spec, default_initial_iterate(bp.spec));
  const auto exact = bp.exact(bp.spec.grid, bp.spec.t_final);
  EXPECT_LE(max_abs_diff(result.solution.physical(), exact.physical()), 1e-12);
  EXPECT_EQ(result.trace.size(), 10u);
}

TEST(Evolution, ShortFinalSlab) {
  auto spec = builtin_problem("heat1d").spec;
  spec.t_final = 0.25;
  double last_time = 0.0;
  int slabs = 0;
  const auto result = picard_solve(spec, default_initial_iterate(spec), {}, [&](int, double t, const SpectralField&) {
    last_time = t;
    ++slabs;
  });
  EXPECT_EQ(slabs, 3);
  EXPECT_EQ(last_time, 0.25);
  const auto exact = builtin_problem("heat1d").exact(spec.grid, 0.25);
  EXPECT_LE(max_abs_diff(result.solution.physical(), exact.physical()), 1e-12);
}

TEST(Evolution, LogisticFileMatchesClosedForm) {
  const auto spec = parse_problem(slurp(std::filesystem::path(PDEFIX_CORPUS_DIR) / "09_logistic.pde"));
  const auto result = picard_solve(spec, default_initial_iterate(spec));
  const double exact = 1.0 / (1.0 + 9.0 * std::exp(1.0));
  for (double v : result.solution.physical()) EXPECT_NEAR(v, exact, 1e-4);
}
