#include <cmath>

#include "pdefix/errors.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

namespace {

class Evaluator {
 public:
  Evaluator(const Grid& grid, const SpectralField* u, const SpectralField* forcing)
      : grid_(grid), u_(u), forcing_(forcing) {}

  std::vector<double> eval(const ExprNode& node) {
    if (const auto* s = std::get_if<SumNode>(&node.node)) {
      std::vector<double> acc = eval(*s->children.front());
      for (std::size_t i = 1; i < s->children.size(); ++i) {
        const auto term = eval(*s->children[i]);
        for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += term[p];
      }
      return acc;
    }
    if (const auto* p = std::get_if<ProductNode>(&node.node)) return eval_product(*p);
    if (const auto* c = std::get_if<ConstantNode>(&node.node)) {
      return std::vector<double>(grid_.size(), c->value);
    }
    if (const auto* r = std::get_if<ComponentRefNode>(&node.node)) {
      const auto v = field(u_, r->component, "u");
      return {v.begin(), v.end()};
    }
    if (const auto* d = std::get_if<DerivFactorNode>(&node.node)) return derivative(*d);
    if (const auto* f = std::get_if<ForcingRefNode>(&node.node)) {
      const auto v = field(forcing_, f->index, "f");
      return {v.begin(), v.end()};
    }
    const auto& cf = std::get<CoordFuncNode>(node.node);
    if (cf.axis >= grid_.dim()) throw Error(ErrorCode::DimensionMismatch, "coordinate axis beyond dim");
    std::vector<double> out(grid_.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
      const double x = grid_.coordinate(cf.axis, grid_.unflatten(p)[cf.axis]);
      out[p] = cf.func == CoordFunction::Sin ? std::sin(cf.frequency * x) : std::cos(cf.frequency * x);
    }
    return out;
  }

 private:
  const Grid& grid_;
  const SpectralField* u_;
  const SpectralField* forcing_;
  std::vector<WaveVector> waves_;

  std::span<const double> field(const SpectralField* f, int index, const char* name) const {
    if (!f || index >= f->components()) {
      throw Error(ErrorCode::ComponentOutOfRange, std::string(name) + "[" + std::to_string(index) + "]");
    }
    return f->physical(index);
  }

  const std::vector<WaveVector>& waves() {
    if (waves_.empty()) {
      waves_.reserve(grid_.size());
      for (std::size_t i = 0; i < grid_.size(); ++i) waves_.push_back(grid_.wave_vector(i));
    }
    return waves_;
  }

  std::vector<double> derivative(const DerivFactorNode& d) {
    if (!u_ || d.component >= u_->components()) {
      throw Error(ErrorCode::ComponentOutOfRange, "u[" + std::to_string(d.component) + "]");
    }
    const auto coeffs = u_->spectral(d.component);
    const auto& w = waves();
    std::vector<Complex> out(coeffs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs[i] * fourier_symbol(d.alpha, w[i]);
    return inverse_transform(grid_, out);
  }

  void dealias(std::vector<double>& values) const {
    auto coeffs = forward_transform(grid_, std::span<const double>(values));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (!grid_.retained_by_dealiasing(i)) coeffs[i] = Complex(0.0, 0.0);
    }
    values = inverse_transform(grid_, coeffs);
  }

  std::vector<double> eval_product(const ProductNode& p) {
    double scale = 1.0;
    std::vector<double> acc;
    bool have_factor = false;
    for (const auto& child : p.children) {
      if (const auto* c = std::get_if<ConstantNode>(&child->node)) {
        scale *= c->value;
        continue;
      }
      auto v = eval(*child);
      if (!have_factor) {
        acc = std::move(v);
        have_factor = true;
        continue;
      }
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= v[i];
      dealias(acc);
    }
    if (!have_factor) return std::vector<double>(grid_.size(), scale);
    if (scale != 1.0) {
      for (double& x : acc) x *= scale;
    }
    return acc;
  }
};

}  // namespace

SpectralField evaluate_expr(const ExprNode& node, const SpectralField& u,
                            const SpectralField& forcing_fields) {
  Evaluator ev(u.grid(), &u, forcing_fields.components() > 0 ? &forcing_fields : nullptr);
  return SpectralField::from_physical(u.grid(), 1, ev.eval(node));
}

namespace {

SpectralField evaluate_coordinate_exprs(const Grid& grid, const std::vector<ExprPtr>& exprs,
                                        int components) {
  std::vector<double> values(grid.size() * components, 0.0);
  Evaluator ev(grid, nullptr, nullptr);
  for (int k = 0; k < components; ++k) {
    if (k >= static_cast<int>(exprs.size()) || !exprs[k]) continue;
    const auto v = ev.eval(*exprs[k]);
    std::copy(v.begin(), v.end(), values.begin() + k * grid.size());
  }
  return SpectralField::from_physical(grid, components, std::move(values));
}

}  // namespace

SpectralField evaluate_forcing(const ProblemSpec& spec) {
  return evaluate_coordinate_exprs(spec.grid, spec.forcing, spec.components);
}

SpectralField evaluate_initial(const ProblemSpec& spec) {
  if (spec.kind != ProblemKind::Evolution) {
    throw Error(ErrorCode::InvalidArgument, "initial condition requested for a stationary problem");
  }
  return evaluate_coordinate_exprs(spec.grid, spec.initial, spec.components);
}

SpectralField apply_linear(const LinearOperator& op, const SpectralField& u) {
  const Grid& grid = u.grid();
  const std::size_t n = grid.size();
  const int neq = op.equation_count();
  std::vector<Complex> out(n * neq, Complex(0.0, 0.0));
  std::vector<WaveVector> waves;
  waves.reserve(n);
  for (std::size_t i = 0; i < n; ++i) waves.push_back(grid.wave_vector(i));
  for (int k = 0; k < neq; ++k) {
    for (const auto& term : op.equations[k]) {
      const auto coeffs = u.spectral(term.component);
      for (std::size_t i = 0; i < n; ++i) {
        out[k * n + i] += term.coefficient * fourier_symbol(term.alpha, waves[i]) * coeffs[i];
      }
    }
  }
  return SpectralField::from_spectral(grid, neq, out);
}

}  // namespace pdefix
