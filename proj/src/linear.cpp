#include "pdefix/linear.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "pdefix/errors.hpp"

namespace pdefix {

namespace {

// Below this |det| relative to the largest one a mode counts as singular.
constexpr double kSingularRelTol = 1e-12;
constexpr double kNegligibleRhs = 1e-12;
constexpr double kMaxCondition = 1e12;

std::string describe_mode(const Grid& grid, std::size_t flat) {
  const auto w = grid.wave_vector(flat);
  std::ostringstream out;
  out << "mode (";
  for (std::size_t j = 0; j < w.modes.size(); ++j) out << (j ? "," : "") << w.modes[j];
  out << ")";
  return out.str();
}

void check_field(const Grid& grid, int components, const SpectralField& f) {
  if (!(f.grid() == grid) || f.components() != components) {
    throw Error(ErrorCode::ShapeMismatch, "field shape does not match the operator");
  }
}

ModeVector gather(const SpectralField& f, std::size_t mode) {
  ModeVector v(f.components());
  for (int c = 0; c < f.components(); ++c) v(c) = f.spectral(c)[mode];
  return v;
}

void scatter(std::vector<Complex>& out, std::size_t n, std::size_t mode, const ModeVector& v) {
  for (Eigen::Index c = 0; c < v.size(); ++c) out[c * n + mode] = v(c);
}

bool is_diagonal(const ModeMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != c && m(r, c) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

SymbolMatrix::SymbolMatrix(Grid grid, int components, std::vector<ModeMatrix> modes)
    : grid_(std::move(grid)), components_(components), modes_(std::move(modes)) {
  for (const auto& m : modes_) max_det_ = std::max(max_det_, std::abs(m.determinant()));
}

SymbolMatrix assemble_symbol(const LinearOperator& linop, const Grid& grid, int components) {
  if (linop.equation_count() != components) {
    throw Error(ErrorCode::DimensionMismatch, "linear operator has " +
                                                  std::to_string(linop.equation_count()) +
                                                  " equations for " + std::to_string(components) +
                                                  " components");
  }
  std::vector<ModeMatrix> modes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const WaveVector w = grid.wave_vector(i);
    ModeMatrix m = ModeMatrix::Zero(components, components);
    for (int k = 0; k < components; ++k) {
      for (const auto& term : linop.equations[k]) {
        if (term.component < 0 || term.component >= components) {
          throw Error(ErrorCode::ComponentOutOfRange, std::to_string(term.component));
        }
        m(k, term.component) += term.coefficient * fourier_symbol(term.alpha, w);
      }
    }
    modes[i] = std::move(m);
  }
  return SymbolMatrix(grid, components, std::move(modes));
}

ConstraintProjector::ConstraintProjector(ConstraintKind kind, const Grid& grid, int components)
    : kind_(kind), grid_(grid), components_(components) {
  if (kind_ == ConstraintKind::Leray && components != grid.dim()) {
    throw Error(ErrorCode::ConstraintArityMismatch,
                "leray projection needs components == dim (" + std::to_string(components) + " vs " +
                    std::to_string(grid.dim()) + ")");
  }
}

ModeMatrix ConstraintProjector::at(std::size_t flat_mode) const {
  ModeMatrix p = ModeMatrix::Identity(components_, components_);
  if (kind_ != ConstraintKind::Leray) return p;
  const WaveVector w = grid_.wave_vector(flat_mode);
  double k2 = 0.0;
  for (int j = 0; j < grid_.dim(); ++j) k2 += w.derivative_kappa(j) * w.derivative_kappa(j);
  if (k2 == 0.0) return p;
  for (int r = 0; r < components_; ++r) {
    for (int c = 0; c < components_; ++c) {
      p(r, c) -= w.derivative_kappa(r) * w.derivative_kappa(c) / k2;
    }
  }
  return p;
}

SpectralField project(const ConstraintProjector& proj, const SpectralField& v) {
  if (!proj.active()) return v;
  if (v.components() != v.dim()) {
    throw Error(ErrorCode::ConstraintArityMismatch, "leray projection needs components == dim");
  }
  const std::size_t n = v.points();
  std::vector<Complex> out(n * v.components());
  for (std::size_t i = 0; i < n; ++i) {
    const bool zero_mode = (i == 0);
    const ModeVector x = gather(v, i);
    scatter(out, n, i, zero_mode ? x : ModeVector(proj.at(i) * x));
  }
  return SpectralField::from_spectral(v.grid(), v.components(), out);
}

SpectralField apply_symbol(const SymbolMatrix& sym, const SpectralField& u) {
  check_field(sym.grid(), sym.components(), u);
  const std::size_t n = u.points();
  std::vector<Complex> out(n * u.components());
  for (std::size_t i = 0; i < n; ++i) scatter(out, n, i, sym.at(i) * gather(u, i));
  return SpectralField::from_spectral(u.grid(), u.components(), out);
}

SpectralField invert_stationary(const SymbolMatrix& sym, const SpectralField& rhs,
                                const ConstraintProjector& proj) {
  check_field(sym.grid(), sym.components(), rhs);
  const std::size_t n = rhs.points();
  const int N = sym.components();
  const double det_tol = kSingularRelTol * sym.max_abs_determinant();
  std::vector<Complex> out(n * N, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    ModeVector g = gather(rhs, i);
    if (proj.active()) g = proj.at(i) * g;
    const ModeMatrix& m = sym.at(i);
    const double det = std::abs(m.determinant());
    if (sym.max_abs_determinant() == 0.0 || det < det_tol) {
      if (g.norm() > kNegligibleRhs) {
        std::ostringstream msg;
        msg << describe_mode(sym.grid(), i) << " has a singular symbol (|det| = " << det
            << ") but right-hand side magnitude " << g.norm();
        throw Error(ErrorCode::ZeroModeSingular, msg.str());
      }
      continue;
    }
    if (N > 1) {
      Eigen::JacobiSVD<ModeMatrix> svd(m);
      const auto& s = svd.singularValues();
      const double cond = s(0) / s(s.size() - 1);
      if (!(cond <= kMaxCondition)) {
        throw Error(ErrorCode::IllConditioned,
                    describe_mode(sym.grid(), i) + " condition estimate " + std::to_string(cond));
      }
    }
    ModeVector x = m.partialPivLu().solve(g);
    if (proj.active()) x = proj.at(i) * x;
    scatter(out, n, i, x);
  }
  return SpectralField::from_spectral(rhs.grid(), N, out);
}

Propagator::Propagator(const SymbolMatrix& sym, double dt)
    : grid_(sym.grid()), components_(sym.components()), dt_(dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "time step must be finite and non-negative");
  }
  modes_.resize(sym.mode_count());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const ModeMatrix a = -dt * sym.at(i);
    ModeMatrix e;
    if (is_diagonal(a)) {
      e = ModeMatrix::Zero(components_, components_);
      for (int c = 0; c < components_; ++c) e(c, c) = std::exp(a(c, c));
    } else {
      e = a.exp();
    }
    if (!e.allFinite()) {
      throw Error(ErrorCode::IllConditioned,
                  describe_mode(grid_, i) + ": matrix exponential is not finite");
    }
    modes_[i] = std::move(e);
  }
}

SpectralField Propagator::apply(const SpectralField& u) const {
  check_field(grid_, components_, u);
  const std::size_t n = u.points();
  std::vector<Complex> out(n * components_);
  for (std::size_t i = 0; i < n; ++i) scatter(out, n, i, modes_[i] * gather(u, i));
  return SpectralField::from_spectral(u.grid(), components_, out);
}

SpectralField propagate(const SymbolMatrix& sym, const SpectralField& u, double dt) {
  return Propagator(sym, dt).apply(u);
}

SlabResult duhamel_slab(const Propagator& prop, const FieldMap& g, const SpectralField& u0,
                        const ConstraintProjector& proj, const SlabOptions& opts) {
  const double dt = prop.dt();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "slab width must be positive");
  auto integrand = [&](const SpectralField& u) { return project(proj, g(u)); };

  const SpectralField e_u0 = prop.apply(u0);
  const SpectralField e_g0 = prop.apply(integrand(u0));
  const SpectralField base = axpby(1.0, e_u0, 0.5 * dt, e_g0);
  SpectralField w = axpby(1.0, e_u0, dt, e_g0);

  double update = 0.0;
  for (int m = 1; m <= opts.max_inner; ++m) {
    SpectralField next = project(proj, axpby(1.0, base, 0.5 * dt, integrand(w)));
    update = norm(next - w, NormKind::Linf);
    w = std::move(next);
    if (!std::isfinite(update)) break;
    if (update <= opts.slab_tol) return {std::move(w), m, update};
  }
  std::ostringstream msg;
  msg << "slab did not converge after " << opts.max_inner << " inner iterations (last update "
      << update << "); reduce dt";
  throw Error(ErrorCode::SlabNonConvergence, msg.str());
}

SpectralField duhamel_step(const SymbolMatrix& sym, const FieldMap& g, const SpectralField& u0,
                           double dt, const ConstraintProjector& proj, const SlabOptions& opts) {
  return duhamel_slab(Propagator(sym, dt), g, u0, proj, opts).u;
}

}  // namespace pdefix
