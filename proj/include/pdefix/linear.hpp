#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pdefix/field.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

/// Small dense per-mode matrix, at most 4x4.
using ModeMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::AutoAlign, kMaxComponents, kMaxComponents>;
using ModeVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::AutoAlign, kMaxComponents, 1>;

/// M(kappa)[k][j] = sum of coefficient * symbol(alpha, kappa) over the
/// linear terms of equation k acting on component j, for every grid mode.
class SymbolMatrix {
 public:
  SymbolMatrix(Grid grid, int components, std::vector<ModeMatrix> modes);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  const ModeMatrix& at(std::size_t flat_mode) const { return modes_.at(flat_mode); }
  /// Largest |det M(kappa)| over all modes.
  double max_abs_determinant() const noexcept { return max_det_; }

 private:
  Grid grid_;
  int components_;
  std::vector<ModeMatrix> modes_;
  double max_det_ = 0.0;
};

SymbolMatrix assemble_symbol(const LinearOperator& linop, const Grid& grid, int components);

/// Per-mode orthogonal projector. Leray: P = I - k k^T / |k|^2 with
/// first-derivative wavenumbers, identity where k = 0.
class ConstraintProjector {
 public:
  ConstraintProjector() = default;
  /// Throws ConstraintArityMismatch for leray unless components == dim.
  ConstraintProjector(ConstraintKind kind, const Grid& grid, int components);

  ConstraintKind kind() const noexcept { return kind_; }
  bool active() const noexcept { return kind_ != ConstraintKind::None; }
  ModeMatrix at(std::size_t flat_mode) const;

 private:
  ConstraintKind kind_ = ConstraintKind::None;
  Grid grid_;
  int components_ = 0;
};

SpectralField project(const ConstraintProjector& proj, const SpectralField& v);

/// M(kappa) u_hat(kappa) per mode.
SpectralField apply_symbol(const SymbolMatrix& sym, const SpectralField& u);

/// Solves M(kappa) u_hat = g_hat per mode. Singular modes with negligible
/// right-hand side are set to zero. Throws ZeroModeSingular or
/// IllConditioned.
SpectralField invert_stationary(const SymbolMatrix& sym, const SpectralField& rhs,
                                const ConstraintProjector& proj = {});

/// exp(-dt M(kappa)) for every mode, computed once per step size.
class Propagator {
 public:
  Propagator(const SymbolMatrix& sym, double dt);

  double dt() const noexcept { return dt_; }
  SpectralField apply(const SpectralField& u) const;
  const ModeMatrix& at(std::size_t flat_mode) const { return modes_.at(flat_mode); }

 private:
  Grid grid_;
  int components_;
  double dt_;
  std::vector<ModeMatrix> modes_;
};

SpectralField propagate(const SymbolMatrix& sym, const SpectralField& u, double dt);

using FieldMap = std::function<SpectralField(const SpectralField&)>;

struct SlabOptions {
  double slab_tol = 1e-12;
  int max_inner = 50;
};

struct SlabResult {
  SpectralField u;
  int inner_iterations = 0;
  /// Linf of the final inner update.
  double last_update = 0.0;
};

/// One slab of the mild solution u(dt) = E u0 + int_0^dt e^{-(dt-s)M} g(u(s)) ds,
/// E = exp(-dt M), with the two-node exponential trapezoid rule
///   u_{m+1} = E u0 + dt/2 (E g(u0) + g(u_m)),
/// iterated to slab_tol. Throws SlabNonConvergence.
SlabResult duhamel_slab(const Propagator& prop, const FieldMap& g, const SpectralField& u0,
                        const ConstraintProjector& proj = {}, const SlabOptions& opts = {});

SpectralField duhamel_step(const SymbolMatrix& sym, const FieldMap& g, const SpectralField& u0,
                           double dt, const ConstraintProjector& proj = {},
                           const SlabOptions& opts = {});

}  // namespace pdefix
