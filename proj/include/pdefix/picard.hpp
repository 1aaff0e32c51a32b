#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pdefix/field.hpp"
#include "pdefix/linear.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
  int divergence_window = 5;
  NormKind norm = NormKind::L2;

  /// Throws InvalidArgument unless 0 < damping <= 1, tol > 0, max_iter >= 1.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double update_norm = 0.0;
  double residual_norm = 0.0;
  /// update_norm / previous update_norm; absent for the first record.
  std::optional<double> contraction;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  const IterationRecord& back() const { return records.back(); }
};

/// Geometric mean of the last min(5, available) contraction ratios; absent
/// when none is defined. Throws InsufficientData below 3 records.
std::optional<double> estimate_contraction(const ConvergenceTrace& trace);

/// u -> L^{-1}(f - F_n(u)) for a stationary problem, with the constraint
/// projection when one is active.
class FixedPointMap {
 public:
  explicit FixedPointMap(const ProblemSpec& spec);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const SymbolMatrix& symbol() const noexcept { return symbol_; }
  const ConstraintProjector& projector() const noexcept { return projector_; }
  const SpectralField& forcing() const noexcept { return forcing_; }

  /// f - F_n(u), componentwise.
  SpectralField modified_forcing(const SpectralField& u) const;
  /// L^{-1} applied to a right-hand side.
  SpectralField solve_linear(const SpectralField& rhs) const;
  SpectralField operator()(const SpectralField& u) const { return solve_linear(modified_forcing(u)); }

 private:
  ProblemSpec spec_;
  SymbolMatrix symbol_;
  ConstraintProjector projector_;
  SpectralField forcing_;
  SpectralField raw_forcing_;
};

/// f - F_n(u) for any problem kind.
SpectralField modified_forcing(const ProblemSpec& spec, const SpectralField& u);

struct IterationState {
  SpectralField current;
  SpectralField previous;
  /// f - F_n(current) as of the last step.
  SpectralField modified_forcing;
  int iteration = 0;
  ConvergenceTrace trace;
};

/// One damped Picard update of a stationary problem:
///   u <- (1 - theta) u + theta L^{-1}(f - F_n(u)).
/// Appends a trace record. Returns true once the relative stopping rule holds.
bool picard_step(const FixedPointMap& map, IterationState& state, const SolverOptions& opts);

struct SolveResult {
  SpectralField solution;
  ConvergenceTrace trace;
};

/// Called after every evolution slab with (slab index, time, field).
using SlabObserver = std::function<void(int, double, const SpectralField&)>;

/// Stationary: Picard iteration from u0. Evolution: marches Duhamel slabs
/// from u0 to t_final. Throws DivergenceDetected, MaxIterExceeded,
/// ZeroModeSingular, IllConditioned or SlabNonConvergence.
SolveResult picard_solve(const ProblemSpec& spec, const SpectralField& u0, const SolverOptions& opts = {},
                         const SlabObserver& observer = {});

/// Default starting point: zero (stationary) or the initial condition.
SpectralField default_initial_iterate(const ProblemSpec& spec);

}  // namespace pdefix
