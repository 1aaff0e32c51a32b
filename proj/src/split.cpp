#include "pdefix/errors.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

bool LinearOperator::empty() const noexcept {
  for (const auto& eq : equations) {
    if (!eq.empty()) return false;
  }
  return true;
}

bool SplitSystem::has_nonlinear_terms() const noexcept {
  for (const auto& n : nonlinear) {
    if (n) return true;
  }
  return false;
}

namespace {

struct SignedTerm {
  bool negated = false;
  ExprPtr term;
};

void collect_terms(const ExprPtr& node, bool negated, std::vector<SignedTerm>& out) {
  if (const auto* s = std::get_if<SumNode>(&node->node)) {
    for (const auto& c : s->children) collect_terms(c, negated, out);
  } else {
    out.push_back({negated, node});
  }
}

ExprPtr combine(std::vector<ExprPtr> parts) {
  if (parts.empty()) return nullptr;
  if (parts.size() == 1) return parts.front();
  return make_sum(std::move(parts));
}

enum class TermClass { Linear, Nonlinear, Forcing };

struct Classified {
  TermClass kind = TermClass::Nonlinear;
  double coefficient = 0.0;
  int component = 0;
  MultiIndex alpha;
};

// A term is linear iff it is a (constant-scaled) single u[j] or D(..)u[j].
Classified classify(const ExprPtr& term, int dim) {
  Classified out;
  if (!depends_on_field(*term)) {
    out.kind = TermClass::Forcing;
    return out;
  }
  auto as_field = [&](const ExprNode& n, double coefficient) {
    if (const auto* r = std::get_if<ComponentRefNode>(&n.node)) {
      out = {TermClass::Linear, coefficient, r->component, MultiIndex(std::vector<int>(dim, 0))};
      return true;
    }
    if (const auto* d = std::get_if<DerivFactorNode>(&n.node)) {
      out = {TermClass::Linear, coefficient, d->component, d->alpha};
      return true;
    }
    return false;
  };
  if (as_field(*term, 1.0)) return out;

  const auto* p = std::get_if<ProductNode>(&term->node);
  if (!p) return out;
  double coefficient = 1.0;
  const ExprNode* field = nullptr;
  int field_count = 0;
  bool has_coord = false;
  bool has_other = false;
  for (const auto& c : p->children) {
    if (const auto* k = std::get_if<ConstantNode>(&c->node)) {
      coefficient *= k->value;
    } else if (std::holds_alternative<ComponentRefNode>(c->node) ||
               std::holds_alternative<DerivFactorNode>(c->node)) {
      field = c.get();
      ++field_count;
    } else if (std::holds_alternative<CoordFuncNode>(c->node)) {
      has_coord = true;
    } else {
      has_other = true;
    }
  }
  if (field_count != 1 || has_other) return out;
  if (has_coord) {
    const auto* d = std::get_if<DerivFactorNode>(&field->node);
    if (d && d->alpha.order() > 0) {
      throw Error(ErrorCode::UnsupportedTerm,
                  "x-dependent coefficient multiplying a derivative: " + print_expr(*term));
    }
    return out;
  }
  as_field(*field, coefficient);
  return out;
}

}  // namespace

SplitSystem split_terms(const std::vector<Equation>& equations, int components, int dim) {
  if (static_cast<int>(equations.size()) != components) {
    throw Error(ErrorCode::InvalidArgument, "one equation per component is required");
  }
  SplitSystem split;
  split.linear.equations.resize(components);
  split.nonlinear.assign(components, nullptr);
  split.forcing.assign(components, nullptr);
  for (int k = 0; k < components; ++k) {
    std::vector<SignedTerm> terms;
    collect_terms(equations[k].lhs, false, terms);
    collect_terms(equations[k].rhs, true, terms);

    std::vector<ExprPtr> nonlinear;
    std::vector<ExprPtr> forcing;
    for (const auto& t : terms) {
      const Classified c = classify(t.term, dim);
      switch (c.kind) {
        case TermClass::Linear: {
          const double coefficient = t.negated ? -c.coefficient : c.coefficient;
          if (coefficient != 0.0) {
            split.linear.equations[k].push_back({k, c.component, coefficient, c.alpha});
          }
          break;
        }
        case TermClass::Nonlinear:
          nonlinear.push_back(t.negated ? negate_term(t.term) : t.term);
          break;
        case TermClass::Forcing:
          // lhs - rhs = ... - forcing, so forcing collects the negated terms.
          forcing.push_back(t.negated ? t.term : negate_term(t.term));
          break;
      }
    }
    split.nonlinear[k] = combine(std::move(nonlinear));
    split.forcing[k] = combine(std::move(forcing));
  }
  return split;
}

}  // namespace pdefix
