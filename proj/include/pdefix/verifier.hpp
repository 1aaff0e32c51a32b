#pragma once

#include <vector>

#include "pdefix/field.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

struct ResidualReport {
  std::vector<double> linf;  // per equation
  std::vector<double> l2;    // per equation
  double overall_max = 0.0;  // max of linf
  Grid grid;
};

/// Evaluates lhs - rhs of every equation at u (spectral derivatives,
/// dealiased products). Stationary problems only.
ResidualReport differential_residual(const ProblemSpec& spec, const SpectralField& u);

/// Per-equation lhs - rhs as a field.
SpectralField residual_field(const ProblemSpec& spec, const SpectralField& u);

struct OracleOptions {
  int max_unknowns = 64;
  double jacobian_step = 1e-7;
  double residual_target = 1e-11;
  int max_newton_steps = 100;
};

/// Dense Newton on the collocation system with a forward-difference
/// Jacobian. Derivative and dealiasing matrices are assembled from explicit
/// DFT sums, independent of the FFT path. Throws TooManyUnknowns or
/// OracleNonConvergence.
SpectralField oracle_newton(const ProblemSpec& spec, const OracleOptions& opts = {});

struct FieldDifference {
  double linf = 0.0;
  /// |a - b|_2 / (1 + |b|_2)
  double relative_l2 = 0.0;
};

/// Throws ShapeMismatch.
FieldDifference compare_fields(const SpectralField& a, const SpectralField& b);

}  // namespace pdefix
