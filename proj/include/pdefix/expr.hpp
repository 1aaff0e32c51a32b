#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pdefix/field.hpp"

namespace pdefix {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct SumNode {
  std::vector<ExprPtr> children;
};
struct ProductNode {
  std::vector<ExprPtr> children;
};
struct ConstantNode {
  double value = 0.0;
};
/// u[j]
struct ComponentRefNode {
  int component = 0;
};
/// D(a1,..,ad)u[j]
struct DerivFactorNode {
  MultiIndex alpha;
  int component = 0;
};
/// f[k]
struct ForcingRefNode {
  int index = 0;
};
enum class CoordFunction { Sin, Cos };
/// sin(freq*x{axis+1}) or cos(...); axis is zero-based.
struct CoordFuncNode {
  CoordFunction func = CoordFunction::Sin;
  int axis = 0;
  int frequency = 1;
};

struct ExprNode {
  std::variant<SumNode, ProductNode, ConstantNode, ComponentRefNode, DerivFactorNode,
               ForcingRefNode, CoordFuncNode>
      node;
};

ExprPtr make_sum(std::vector<ExprPtr> children);
ExprPtr make_product(std::vector<ExprPtr> children);
ExprPtr make_constant(double value);
ExprPtr make_component(int component);
ExprPtr make_derivative(MultiIndex alpha, int component);
ExprPtr make_forcing_ref(int index);
ExprPtr make_coord_func(CoordFunction func, int axis, int frequency);

/// Structural equality; constants compare bitwise-equal values.
bool structurally_equal(const ExprNode& a, const ExprNode& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Text in the problem-file grammar; parsing it back yields a structurally
/// equal tree.
std::string print_expr(const ExprNode& node);

/// -node, folded into a leading constant factor where there is one.
ExprPtr negate_term(const ExprPtr& node);

/// True if any u[j] or D(..)u[j] occurs in the tree.
bool depends_on_field(const ExprNode& node);
/// True if any f[k] occurs in the tree.
bool references_forcing(const ExprNode& node);
/// Largest derivative order occurring in the tree.
int max_derivative_order(const ExprNode& node);

}  // namespace pdefix
