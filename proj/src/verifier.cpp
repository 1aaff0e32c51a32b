#include "pdefix/verifier.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "pdefix/errors.hpp"
#include "pdefix/linear.hpp"

namespace pdefix {

SpectralField residual_field(const ProblemSpec& spec, const SpectralField& u) {
  if (u.components() != spec.components || !(u.grid() == spec.grid)) {
    throw Error(ErrorCode::ShapeMismatch, "field does not match the problem grid/components");
  }
  const SpectralField forcing = evaluate_forcing(spec);
  std::vector<SpectralField> parts;
  parts.reserve(spec.components);
  for (const auto& eq : spec.equations) {
    parts.push_back(evaluate_expr(*eq.lhs, u, forcing) - evaluate_expr(*eq.rhs, u, forcing));
  }
  // With a constraint the equations hold only after projection (the
  // multiplier, e.g. pressure, is implicit).
  return project(ConstraintProjector(spec.constraint, spec.grid, spec.components),
                 stack_components(parts));
}

ResidualReport differential_residual(const ProblemSpec& spec, const SpectralField& u) {
  if (spec.kind != ProblemKind::Stationary) {
    throw Error(ErrorCode::InvalidArgument, "differential residual is defined for stationary problems");
  }
  const SpectralField r = residual_field(spec, u);
  ResidualReport report;
  report.grid = spec.grid;
  for (int k = 0; k < r.components(); ++k) {
    const SpectralField rk = extract_component(r, k);
    report.linf.push_back(norm(rk, NormKind::Linf));
    report.l2.push_back(norm(rk, NormKind::L2));
    report.overall_max = std::max(report.overall_max, report.linf.back());
  }
  return report;
}

FieldDifference compare_fields(const SpectralField& a, const SpectralField& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "compared fields differ in shape");
  const SpectralField d = a - b;
  return {norm(d, NormKind::Linf), norm(d, NormKind::L2) / (1.0 + norm(b, NormKind::L2))};
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

int axis_mode(int index, int points) { return index <= points / 2 ? index : index - points; }

// Dense real matrix of the spectral multiplier s(mode) on the grid:
//   A[p][q] = (1/n) sum_m s(m) exp(i k(m).(x_p - x_q)).
// Built by direct summation over all modes.
template <class Symbol>
Dense dense_multiplier(const Grid& grid, Symbol&& symbol) {
  const std::size_t n = grid.size();
  const int d = grid.dim();
  std::vector<std::array<int, kMaxDim>> idx(n);
  for (std::size_t p = 0; p < n; ++p) idx[p] = grid.unflatten(p);
  std::vector<Complex> sym(n);
  for (std::size_t m = 0; m < n; ++m) sym[m] = symbol(idx[m]);
  Dense a(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      Complex acc(0.0, 0.0);
      for (std::size_t m = 0; m < n; ++m) {
        if (sym[m] == Complex(0.0, 0.0)) continue;
        double phase = 0.0;
        for (int j = 0; j < d; ++j) {
          const int g = grid.points(j);
          phase += 2.0 * std::numbers::pi * axis_mode(idx[m][j], g) * (idx[p][j] - idx[q][j]) / g;
        }
        acc += sym[m] * Complex(std::cos(phase), std::sin(phase));
      }
      a(p, q) = acc.real() / static_cast<double>(n);
    }
  }
  return a;
}

class DenseSystem {
 public:
  explicit DenseSystem(const ProblemSpec& spec) : spec_(spec), grid_(spec.grid), n_(grid_.size()) {
    dealias_ = dense_multiplier(grid_, [&](const std::array<int, kMaxDim>& i) {
      for (int j = 0; j < grid_.dim(); ++j) {
        if (3 * std::abs(axis_mode(i[j], grid_.points(j))) > grid_.points(j)) return Complex(0.0, 0.0);
      }
      return Complex(1.0, 0.0);
    });
    for (std::size_t k = 0; k < spec.forcing.size(); ++k) {
      forcing_.push_back(spec.forcing[k] ? eval(*spec.forcing[k], Vec()) : Vec::Zero(n_));
    }
  }

  std::size_t unknowns() const { return n_ * spec_.components; }

  Vec residual(const Vec& u) {
    Vec r(unknowns());
    for (int k = 0; k < spec_.components; ++k) {
      r.segment(k * n_, n_) = eval(*spec_.equations[k].lhs, u) - eval(*spec_.equations[k].rhs, u);
    }
    return r;
  }

 private:
  const ProblemSpec& spec_;
  const Grid& grid_;
  std::size_t n_;
  Dense dealias_;
  std::map<MultiIndex, Dense> derivatives_;
  std::vector<Vec> forcing_;

  const Dense& derivative(const MultiIndex& alpha) {
    auto it = derivatives_.find(alpha);
    if (it != derivatives_.end()) return it->second;
    Dense a = dense_multiplier(grid_, [&](const std::array<int, kMaxDim>& i) {
      Complex s(1.0, 0.0);
      for (int j = 0; j < grid_.dim(); ++j) {
        const int g = grid_.points(j);
        const int p = alpha.exponents[j];
        if (p == 0) continue;
        if (2 * i[j] == g && p % 2 == 1) return Complex(0.0, 0.0);
        const double k = 2.0 * std::numbers::pi * axis_mode(i[j], g) / grid_.length(j);
        s *= std::pow(Complex(0.0, k), p);
      }
      return s;
    });
    return derivatives_.emplace(alpha, std::move(a)).first->second;
  }

  Vec eval(const ExprNode& node, const Vec& u) {
    if (const auto* s = std::get_if<SumNode>(&node.node)) {
      Vec acc = Vec::Zero(n_);
      for (const auto& c : s->children) acc += eval(*c, u);
      return acc;
    }
    if (const auto* p = std::get_if<ProductNode>(&node.node)) {
      double scale = 1.0;
      Vec acc;
      bool have = false;
      for (const auto& c : p->children) {
        if (const auto* k = std::get_if<ConstantNode>(&c->node)) {
          scale *= k->value;
        } else if (!have) {
          acc = eval(*c, u);
          have = true;
        } else {
          acc = dealias_ * acc.cwiseProduct(eval(*c, u)).eval();
        }
      }
      return have ? Vec(scale * acc) : Vec(Vec::Constant(n_, scale));
    }
    if (const auto* c = std::get_if<ConstantNode>(&node.node)) return Vec::Constant(n_, c->value);
    if (const auto* r = std::get_if<ComponentRefNode>(&node.node)) return u.segment(r->component * n_, n_);
    if (const auto* d = std::get_if<DerivFactorNode>(&node.node)) {
      return derivative(d->alpha) * u.segment(d->component * n_, n_);
    }
    if (const auto* f = std::get_if<ForcingRefNode>(&node.node)) return forcing_.at(f->index);
    const auto& cf = std::get<CoordFuncNode>(node.node);
    Vec out(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      const double x = grid_.length(cf.axis) * grid_.unflatten(p)[cf.axis] / grid_.points(cf.axis);
      out(p) = cf.func == CoordFunction::Sin ? std::sin(cf.frequency * x) : std::cos(cf.frequency * x);
    }
    return out;
  }
};

}  // namespace

SpectralField oracle_newton(const ProblemSpec& spec, const OracleOptions& opts) {
  if (spec.kind != ProblemKind::Stationary) {
    throw Error(ErrorCode::InvalidArgument, "oracle solves stationary problems only");
  }
  if (spec.constraint != ConstraintKind::None) {
    throw Error(ErrorCode::InvalidArgument, "oracle does not support constrained problems");
  }
  const std::size_t total = spec.grid.size() * spec.components;
  if (total > static_cast<std::size_t>(opts.max_unknowns)) {
    throw Error(ErrorCode::TooManyUnknowns, std::to_string(total) + " unknowns exceed the cap of " +
                                                std::to_string(opts.max_unknowns));
  }
  DenseSystem system(spec);
  Vec u = Vec::Zero(total);
  Vec r = system.residual(u);
  double r_norm = r.lpNorm<Eigen::Infinity>();
  Dense jac(total, total);
  int step = 0;
  for (; step < opts.max_newton_steps && r_norm > opts.residual_target; ++step) {
    for (std::size_t q = 0; q < total; ++q) {
      const double h = opts.jacobian_step * std::max(1.0, std::abs(u(q)));
      Vec up = u;
      up(q) += h;
      jac.col(q) = (system.residual(up) - r) / h;
    }
    const Vec delta = jac.fullPivLu().solve(-r);
    if (!delta.allFinite()) break;
    double lambda = 1.0;
    Vec trial = u + delta;
    Vec r_trial = system.residual(trial);
    double trial_norm = r_trial.lpNorm<Eigen::Infinity>();
    for (int halving = 0; halving < 30 && !(trial_norm < r_norm); ++halving) {
      lambda *= 0.5;
      trial = u + lambda * delta;
      r_trial = system.residual(trial);
      trial_norm = r_trial.lpNorm<Eigen::Infinity>();
    }
    if (!(trial_norm < r_norm)) break;
    u = std::move(trial);
    r = std::move(r_trial);
    r_norm = trial_norm;
  }
  if (!(r_norm <= opts.residual_target)) {
    std::ostringstream msg;
    msg << "Newton stopped after " << step << " steps with residual " << r_norm;
    throw Error(ErrorCode::OracleNonConvergence, msg.str());
  }
  return SpectralField::from_physical(spec.grid, spec.components, {u.data(), u.data() + u.size()});
}

}  // namespace pdefix
