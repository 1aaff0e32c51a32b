#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdefix/expr.hpp"
#include "pdefix/field.hpp"

namespace pdefix {

enum class ProblemKind { Stationary, Evolution };
enum class ConstraintKind { None, Leray };

/// coefficient * D^alpha u[component], contributing to equation `equation`.
struct LinearTerm {
  int equation = 0;
  int component = 0;
  double coefficient = 0.0;
  MultiIndex alpha;
};

/// Constant-coefficient linear part, one term list per equation.
struct LinearOperator {
  std::vector<std::vector<LinearTerm>> equations;

  int equation_count() const noexcept { return static_cast<int>(equations.size()); }
  bool empty() const noexcept;
};

/// Per equation: linear(u) + nonlinear(u) - forcing == lhs - rhs.
/// Null nonlinear/forcing entries stand for zero.
struct SplitSystem {
  LinearOperator linear;
  std::vector<ExprPtr> nonlinear;
  std::vector<ExprPtr> forcing;

  bool has_nonlinear_terms() const noexcept;
};

struct Equation {
  ExprPtr lhs;
  ExprPtr rhs;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Stationary;
  Grid grid;
  int components = 1;
  ConstraintKind constraint = ConstraintKind::None;
  std::vector<Equation> equations;
  /// forcing[k] as written in the file; null when the section is absent.
  std::vector<ExprPtr> forcing;
  /// Evolution only.
  std::vector<ExprPtr> initial;
  double t_final = 0.0;
  double dt = 0.0;
  SplitSystem split;

  int dim() const noexcept { return grid.dim(); }
  int max_derivative_order() const;
};

/// Parses a problem file. Throws SyntaxError, ComponentOutOfRange,
/// DimensionMismatch, MissingSection, UnsupportedTerm or
/// ConstraintArityMismatch.
ProblemSpec parse_problem(std::string_view text);

/// Re-parseable text for a problem.
std::string print_problem(const ProblemSpec& spec);

/// Single expression in the equation grammar (no sections).
ExprPtr parse_expression(std::string_view text);

/// Classifies each top-level additive term of lhs - rhs as linear,
/// nonlinear or forcing. Throws UnsupportedTerm for a sin/cos coefficient
/// multiplying a derivative of u.
SplitSystem split_terms(const std::vector<Equation>& equations, int components, int dim);

/// Replace the grid (same dimension) and keep everything else.
ProblemSpec with_grid(const ProblemSpec& spec, const Grid& grid);
/// Multiply every forcing[k] expression by `scale`.
ProblemSpec with_forcing_scale(const ProblemSpec& spec, double scale);

/// Evaluates a term on the grid of u. Derivatives are spectral; the
/// pointwise product of two non-constant factors is dealiased by the 2/3
/// rule. forcing_fields supplies f[k].
SpectralField evaluate_expr(const ExprNode& node, const SpectralField& u,
                            const SpectralField& forcing_fields);

/// f[k] for every equation (zero where forcing[k] is absent).
SpectralField evaluate_forcing(const ProblemSpec& spec);
/// Initial condition of an evolution problem.
SpectralField evaluate_initial(const ProblemSpec& spec);

/// Applies the linear operator through its Fourier symbol.
SpectralField apply_linear(const LinearOperator& op, const SpectralField& u);

}  // namespace pdefix
