#include "pdefix/picard.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pdefix/errors.hpp"
#include "pdefix/verifier.hpp"

namespace pdefix {

void SolverOptions::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (divergence_window < 1) throw Error(ErrorCode::InvalidArgument, "divergence_window must be at least 1");
}

std::optional<double> estimate_contraction(const ConvergenceTrace& trace) {
  if (trace.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                std::to_string(trace.size()) + " iterations recorded, at least 3 needed");
  }
  double log_sum = 0.0;
  int count = 0;
  for (auto it = trace.records.rbegin(); it != trace.records.rend() && count < 5; ++it) {
    if (!it->contraction) break;
    if (*it->contraction <= 0.0) return 0.0;
    log_sum += std::log(*it->contraction);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return std::exp(log_sum / count);
}

namespace {

SpectralField evaluate_split_forcing(const ProblemSpec& spec) {
  const SpectralField f = evaluate_forcing(spec);
  const SpectralField zero = SpectralField::zeros(spec.grid, spec.components);
  std::vector<SpectralField> parts;
  for (int k = 0; k < spec.components; ++k) {
    const auto& expr = spec.split.forcing[k];
    parts.push_back(expr ? evaluate_expr(*expr, zero, f) : SpectralField::zeros(spec.grid, 1));
  }
  return stack_components(parts);
}

// forcing: the split forcing; raw_forcing: the f[k] fields it refers to.
SpectralField subtract_nonlinear(const ProblemSpec& spec, const SpectralField& forcing,
                                 const SpectralField& raw_forcing, const SpectralField& u) {
  if (!spec.split.has_nonlinear_terms()) return forcing;
  std::vector<SpectralField> parts;
  for (int k = 0; k < spec.components; ++k) {
    const auto& expr = spec.split.nonlinear[k];
    SpectralField fk = extract_component(forcing, k);
    parts.push_back(expr ? fk - evaluate_expr(*expr, u, raw_forcing) : fk);
  }
  return stack_components(parts);
}

void check_iterate(const ProblemSpec& spec, const SpectralField& u) {
  if (u.components() != spec.components || !(u.grid() == spec.grid)) {
    throw Error(ErrorCode::ShapeMismatch, "iterate does not match the problem grid/components");
  }
}

std::optional<double> ratio_to_previous(const ConvergenceTrace& trace, double update) {
  if (trace.empty() || !(trace.back().update_norm > 0.0)) return std::nullopt;
  return update / trace.back().update_norm;
}

}  // namespace

FixedPointMap::FixedPointMap(const ProblemSpec& spec)
    : spec_(spec),
      symbol_(assemble_symbol(spec.split.linear, spec.grid, spec.components)),
      projector_(spec.constraint, spec.grid, spec.components),
      forcing_(evaluate_split_forcing(spec)),
      raw_forcing_(evaluate_forcing(spec)) {}

SpectralField FixedPointMap::modified_forcing(const SpectralField& u) const {
  check_iterate(spec_, u);
  return subtract_nonlinear(spec_, forcing_, raw_forcing_, u);
}

SpectralField FixedPointMap::solve_linear(const SpectralField& rhs) const {
  return invert_stationary(symbol_, rhs, projector_);
}

SpectralField modified_forcing(const ProblemSpec& spec, const SpectralField& u) {
  check_iterate(spec, u);
  return subtract_nonlinear(spec, evaluate_split_forcing(spec), evaluate_forcing(spec), u);
}

bool picard_step(const FixedPointMap& map, IterationState& state, const SolverOptions& opts) {
  const ProblemSpec& spec = map.spec();
  state.modified_forcing = map.modified_forcing(state.current);
  const SpectralField image = map.solve_linear(state.modified_forcing);
  SpectralField next = opts.damping == 1.0 ? image : axpby(1.0 - opts.damping, state.current, opts.damping, image);

  IterationRecord rec;
  rec.iteration = state.iteration;
  rec.update_norm = norm(next - state.current, opts.norm);
  rec.contraction = ratio_to_previous(state.trace, rec.update_norm);
  rec.residual_norm = all_finite(next) ? differential_residual(spec, next).overall_max
                                       : std::numeric_limits<double>::infinity();
  state.trace.records.push_back(rec);

  const double next_norm = norm(next, opts.norm);
  state.previous = std::move(state.current);
  state.current = std::move(next);
  ++state.iteration;
  return rec.update_norm <= opts.tol * (1.0 + next_norm);
}

SpectralField default_initial_iterate(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::Evolution ? evaluate_initial(spec)
                                             : SpectralField::zeros(spec.grid, spec.components);
}

namespace {

SolveResult solve_stationary(const ProblemSpec& spec, const SpectralField& u0, const SolverOptions& opts) {
  const FixedPointMap map(spec);
  IterationState state;
  state.current = u0;
  for (int m = 0; m < opts.max_iter; ++m) {
    const bool converged = picard_step(map, state, opts);
    const IterationRecord& rec = state.trace.back();
    if (!std::isfinite(rec.update_norm) || !all_finite(state.current)) {
      throw Error(ErrorCode::DivergenceDetected,
                  "non-finite iterate at iteration " + std::to_string(rec.iteration));
    }
    if (converged) return {state.current, std::move(state.trace)};
    const auto& recs = state.trace.records;
    if (static_cast<int>(recs.size()) >= opts.divergence_window) {
      bool expanding = true;
      for (auto it = recs.end() - opts.divergence_window; it != recs.end(); ++it) {
        expanding = expanding && it->contraction && *it->contraction >= 1.0;
      }
      if (expanding) {
        std::ostringstream msg;
        msg << "contraction ratio >= 1 for " << opts.divergence_window
            << " consecutive iterations (last update " << rec.update_norm << ", ratio "
            << *rec.contraction << ")";
        throw Error(ErrorCode::DivergenceDetected, msg.str());
      }
    }
  }
  std::ostringstream msg;
  msg << "no convergence after " << opts.max_iter << " iterations (last update "
      << state.trace.back().update_norm << ")";
  throw Error(ErrorCode::MaxIterExceeded, msg.str());
}

SolveResult solve_evolution(const ProblemSpec& spec, const SpectralField& u0, const SolverOptions& opts,
                            const SlabObserver& observer) {
  if (!(spec.t_final > 0.0) || !(spec.dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "evolution problems need t_final > 0 and dt > 0");
  }
  const SymbolMatrix symbol = assemble_symbol(spec.split.linear, spec.grid, spec.components);
  const ConstraintProjector projector(spec.constraint, spec.grid, spec.components);
  const SpectralField forcing = evaluate_split_forcing(spec);
  const SpectralField raw_forcing = evaluate_forcing(spec);
  const FieldMap integrand = [&](const SpectralField& u) {
    return subtract_nonlinear(spec, forcing, raw_forcing, u);
  };

  const int slabs = std::max(1, static_cast<int>(std::ceil(spec.t_final / spec.dt - 1e-9)));
  const double last_width = spec.t_final - (slabs - 1) * spec.dt;
  const Propagator full(symbol, spec.dt);
  std::optional<Propagator> tail;
  if (std::abs(last_width - spec.dt) > 1e-12 * spec.dt) tail.emplace(symbol, last_width);

  SolveResult result;
  SpectralField u = project(projector, u0);
  double t = 0.0;
  for (int s = 0; s < slabs; ++s) {
    const Propagator& prop = (s == slabs - 1 && tail) ? *tail : full;
    SlabResult slab = duhamel_slab(prop, integrand, u, projector);
    IterationRecord rec;
    rec.iteration = s;
    rec.update_norm = norm(slab.u - u, opts.norm);
    rec.residual_norm = slab.last_update;
    rec.contraction = ratio_to_previous(result.trace, rec.update_norm);
    result.trace.records.push_back(rec);
    if (!std::isfinite(rec.update_norm) || !all_finite(slab.u)) {
      throw Error(ErrorCode::DivergenceDetected, "non-finite field in slab " + std::to_string(s));
    }
    u = std::move(slab.u);
    t = (s == slabs - 1) ? spec.t_final : (s + 1) * spec.dt;
    if (observer) observer(s, t, u);
  }
  result.solution = std::move(u);
  return result;
}

}  // namespace

SolveResult picard_solve(const ProblemSpec& spec, const SpectralField& u0, const SolverOptions& opts,
                         const SlabObserver& observer) {
  opts.validate();
  check_iterate(spec, u0);
  if (spec.kind == ProblemKind::Evolution) return solve_evolution(spec, u0, opts, observer);
  return solve_stationary(spec, u0, opts);
}

}  // namespace pdefix
