#include "pdefix/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

#include "pdefix/errors.hpp"

namespace pdefix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ExprPtr wrap(auto node) { return std::make_shared<const ExprNode>(ExprNode{std::move(node)}); }

bool children_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(a[i], b[i])) return false;
  }
  return true;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format constant");
  return std::string(buf, end);
}

bool is_negative_constant(const ExprPtr& e) {
  const auto* c = std::get_if<ConstantNode>(&e->node);
  return c && std::signbit(c->value);
}

void print_into(const ExprNode& node, std::string& out, bool leading);

// Child of a sum or product. Parentheses are emitted wherever re-parsing would
// otherwise flatten or re-associate the tree.
void print_child(const ExprPtr& child, std::string& out, bool parent_is_sum, bool leading) {
  const bool child_is_sum = std::holds_alternative<SumNode>(child->node);
  const bool child_is_product = std::holds_alternative<ProductNode>(child->node);
  bool paren = false;
  if (parent_is_sum) {
    paren = child_is_sum;
  } else {
    paren = child_is_sum || child_is_product || (!leading && is_negative_constant(child));
  }
  if (paren) {
    out += '(';
    print_into(*child, out, true);
    out += ')';
  } else {
    print_into(*child, out, leading);
  }
}

void print_into(const ExprNode& node, std::string& out, bool leading) {
  std::visit(overloaded{
                 [&](const SumNode& s) {
                   for (std::size_t i = 0; i < s.children.size(); ++i) {
                     if (i > 0) out += " + ";
                     print_child(s.children[i], out, true, true);
                   }
                 },
                 [&](const ProductNode& p) {
                   for (std::size_t i = 0; i < p.children.size(); ++i) {
                     if (i > 0) out += '*';
                     print_child(p.children[i], out, false, leading && i == 0);
                   }
                 },
                 [&](const ConstantNode& c) { out += format_number(c.value); },
                 [&](const ComponentRefNode& r) { out += "u[" + std::to_string(r.component) + "]"; },
                 [&](const DerivFactorNode& d) {
                   out += "D(";
                   for (std::size_t j = 0; j < d.alpha.size(); ++j) {
                     if (j > 0) out += ',';
                     out += std::to_string(d.alpha.exponents[j]);
                   }
                   out += ")u[" + std::to_string(d.component) + "]";
                 },
                 [&](const ForcingRefNode& f) { out += "f[" + std::to_string(f.index) + "]"; },
                 [&](const CoordFuncNode& c) {
                   out += c.func == CoordFunction::Sin ? "sin(" : "cos(";
                   out += std::to_string(c.frequency) + "*x" + std::to_string(c.axis + 1) + ")";
                 },
             },
             node.node);
}

}  // namespace

ExprPtr make_sum(std::vector<ExprPtr> children) {
  if (children.size() < 2) throw Error(ErrorCode::InvalidArgument, "sum needs at least two terms");
  return wrap(SumNode{std::move(children)});
}

ExprPtr make_product(std::vector<ExprPtr> children) {
  if (children.size() < 2) throw Error(ErrorCode::InvalidArgument, "product needs at least two factors");
  return wrap(ProductNode{std::move(children)});
}

ExprPtr make_constant(double value) { return wrap(ConstantNode{value}); }
ExprPtr make_component(int component) { return wrap(ComponentRefNode{component}); }
ExprPtr make_derivative(MultiIndex alpha, int component) {
  return wrap(DerivFactorNode{std::move(alpha), component});
}
ExprPtr make_forcing_ref(int index) { return wrap(ForcingRefNode{index}); }
ExprPtr make_coord_func(CoordFunction func, int axis, int frequency) {
  return wrap(CoordFuncNode{func, axis, frequency});
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const SumNode& s) { return children_equal(s.children, std::get<SumNode>(b.node).children); },
          [&](const ProductNode& p) {
            return children_equal(p.children, std::get<ProductNode>(b.node).children);
          },
          [&](const ConstantNode& c) {
            const double other = std::get<ConstantNode>(b.node).value;
            return std::memcmp(&c.value, &other, sizeof(double)) == 0;
          },
          [&](const ComponentRefNode& r) { return r.component == std::get<ComponentRefNode>(b.node).component; },
          [&](const DerivFactorNode& d) {
            const auto& o = std::get<DerivFactorNode>(b.node);
            return d.component == o.component && d.alpha == o.alpha;
          },
          [&](const ForcingRefNode& f) { return f.index == std::get<ForcingRefNode>(b.node).index; },
          [&](const CoordFuncNode& c) {
            const auto& o = std::get<CoordFuncNode>(b.node);
            return c.func == o.func && c.axis == o.axis && c.frequency == o.frequency;
          },
      },
      a.node);
}

std::string print_expr(const ExprNode& node) {
  std::string out;
  print_into(node, out, true);
  return out;
}

bool depends_on_field(const ExprNode& node) {
  return std::visit(overloaded{
                        [](const SumNode& s) {
                          return std::any_of(s.children.begin(), s.children.end(),
                                             [](const ExprPtr& c) { return depends_on_field(*c); });
                        },
                        [](const ProductNode& p) {
                          return std::any_of(p.children.begin(), p.children.end(),
                                             [](const ExprPtr& c) { return depends_on_field(*c); });
                        },
                        [](const ComponentRefNode&) { return true; },
                        [](const DerivFactorNode&) { return true; },
                        [](const auto&) { return false; },
                    },
                    node.node);
}

bool references_forcing(const ExprNode& node) {
  return std::visit(overloaded{
                        [](const SumNode& s) {
                          return std::any_of(s.children.begin(), s.children.end(),
                                             [](const ExprPtr& c) { return references_forcing(*c); });
                        },
                        [](const ProductNode& p) {
                          return std::any_of(p.children.begin(), p.children.end(),
                                             [](const ExprPtr& c) { return references_forcing(*c); });
                        },
                        [](const ForcingRefNode&) { return true; },
                        [](const auto&) { return false; },
                    },
                    node.node);
}

int max_derivative_order(const ExprNode& node) {
  return std::visit(overloaded{
                        [](const SumNode& s) {
                          int m = 0;
                          for (const auto& c : s.children) m = std::max(m, max_derivative_order(*c));
                          return m;
                        },
                        [](const ProductNode& p) {
                          int m = 0;
                          for (const auto& c : p.children) m = std::max(m, max_derivative_order(*c));
                          return m;
                        },
                        [](const DerivFactorNode& d) { return d.alpha.order(); },
                        [](const auto&) { return 0; },
                    },
                    node.node);
}

}  // namespace pdefix

namespace pdefix {

ExprPtr negate_term(const ExprPtr& node) {
  if (const auto* c = std::get_if<ConstantNode>(&node->node)) return make_constant(-c->value);
  if (const auto* p = std::get_if<ProductNode>(&node->node)) {
    auto children = p->children;
    if (const auto* lead = std::get_if<ConstantNode>(&children.front()->node)) {
      children.front() = make_constant(-lead->value);
    } else {
      children.insert(children.begin(), make_constant(-1.0));
    }
    return make_product(std::move(children));
  }
  return make_product({make_constant(-1.0), node});
}

}  // namespace pdefix
