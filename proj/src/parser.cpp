#include <algorithm>
#include <charconv>
#include <cctype>
#include <map>
#include <sstream>

#include "pdefix/errors.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

namespace {

[[noreturn]] void syntax_error(int line, int column, const std::string& expected) {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": expected " + expected);
}

// Recursive-descent parser over one expression. Columns are 1-based and
// offset by the position of the expression within its line.
class ExprParser {
 public:
  ExprParser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  ExprPtr parse_all() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("'+', '-', '*' or end of expression");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int offset_;

  [[noreturn]] void fail(const std::string& expected) const {
    syntax_error(line_, offset_ + static_cast<int>(pos_) + 1, expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("'" + std::string(token) + "'");
  }

  int parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("integer");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("integer in range");
    }
    return value;
  }

  double parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail("number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("finite number");
    }
    return value;
  }

  ExprPtr parse_expr() {
    std::vector<ExprPtr> terms;
    terms.push_back(parse_term());
    while (true) {
      if (accept("+")) {
        terms.push_back(parse_term());
      } else if (accept("-")) {
        terms.push_back(negate_term(parse_unsigned_term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : make_sum(std::move(terms));
  }

  ExprPtr parse_term() {
    if (accept("-")) return negate_term(parse_unsigned_term());
    return parse_unsigned_term();
  }

  ExprPtr parse_unsigned_term() {
    std::vector<ExprPtr> factors;
    factors.push_back(parse_factor());
    while (accept("*")) factors.push_back(parse_factor());
    return factors.size() == 1 ? factors.front() : make_product(std::move(factors));
  }

  ExprPtr parse_coord_func(CoordFunction func) {
    const int freq = parse_int();
    expect("*");
    expect("x");
    const std::size_t axis_pos = pos_;
    const int axis = parse_int();
    if (axis < 1) {
      pos_ = axis_pos;
      fail("axis number >= 1");
    }
    expect(")");
    return make_coord_func(func, axis - 1, freq);
  }

  ExprPtr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("factor");
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (accept("u[")) {
      const int j = parse_int();
      expect("]");
      return make_component(j);
    }
    if (accept("f[")) {
      const int k = parse_int();
      expect("]");
      return make_forcing_ref(k);
    }
    if (accept("D(")) {
      std::vector<int> alpha{parse_int()};
      while (accept(",")) alpha.push_back(parse_int());
      expect(")");
      expect("u[");
      const int j = parse_int();
      expect("]");
      return make_derivative(MultiIndex(std::move(alpha)), j);
    }
    if (accept("sin(")) return parse_coord_func(CoordFunction::Sin);
    if (accept("cos(")) return parse_coord_func(CoordFunction::Cos);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_constant(parse_number());
    fail("number, u[j], D(..)u[j], f[k], sin(, cos( or '('");
  }
};

struct Line {
  int number = 0;
  int value_column = 0;  // 1-based column where the value starts
  std::string_view value;
};

std::string_view trim(std::string_view s, int* lead = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = static_cast<int>(b);
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_plain_int(const Line& line, std::string_view token) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    syntax_error(line.number, line.value_column, "integer");
  }
  return v;
}

double parse_plain_double(const Line& line, std::string_view token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
    syntax_error(line.number, line.value_column, "decimal number");
  }
  return v;
}

template <class F>
void visit_nodes(const ExprNode& node, F&& fn) {
  fn(node);
  if (const auto* s = std::get_if<SumNode>(&node.node)) {
    for (const auto& c : s->children) visit_nodes(*c, fn);
  } else if (const auto* p = std::get_if<ProductNode>(&node.node)) {
    for (const auto& c : p->children) visit_nodes(*c, fn);
  }
}

// Bounds and arity checks shared by every expression in a file.
void validate_expr(const ExprNode& root, int dim, int components, int line) {
  visit_nodes(root, [&](const ExprNode& n) {
    const std::string where = " (line " + std::to_string(line) + ")";
    if (const auto* r = std::get_if<ComponentRefNode>(&n.node)) {
      if (r->component >= components) {
        throw Error(ErrorCode::ComponentOutOfRange, std::to_string(r->component) + where);
      }
    } else if (const auto* d = std::get_if<DerivFactorNode>(&n.node)) {
      if (d->component >= components) {
        throw Error(ErrorCode::ComponentOutOfRange, std::to_string(d->component) + where);
      }
      if (static_cast<int>(d->alpha.size()) != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "multi-index has " + std::to_string(d->alpha.size()) + " entries but dim is " +
                        std::to_string(dim) + where);
      }
    } else if (const auto* f = std::get_if<ForcingRefNode>(&n.node)) {
      if (f->index >= components) {
        throw Error(ErrorCode::ComponentOutOfRange, std::to_string(f->index) + where);
      }
    } else if (const auto* c = std::get_if<CoordFuncNode>(&n.node)) {
      if (c->axis >= dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "x" + std::to_string(c->axis + 1) + " used with dim " + std::to_string(dim) + where);
      }
    }
  });
}

void require_coordinate_only(const ExprNode& root, int line) {
  visit_nodes(root, [&](const ExprNode& n) {
    if (std::holds_alternative<ComponentRefNode>(n.node) ||
        std::holds_alternative<DerivFactorNode>(n.node) ||
        std::holds_alternative<ForcingRefNode>(n.node)) {
      syntax_error(line, 1, "only constants, sin and cos in forcing/initial expressions");
    }
  });
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

ExprPtr parse_expression(std::string_view text) { return ExprParser(text, 1, 0).parse_all(); }

ProblemSpec parse_problem(std::string_view text) {
  std::map<std::string, Line> scalars;
  std::map<int, Line> equation_lines, forcing_lines, initial_lines;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    int lead = 0;
    const std::string_view content = trim(raw, &lead);
    if (content.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto colon = content.find(':');
    if (colon == std::string_view::npos) syntax_error(line_no, lead + 1, "'key: value'");
    const std::string key(trim(content.substr(0, colon)));
    int value_lead = 0;
    const std::string_view after = content.substr(colon + 1);
    Line line{line_no, lead + static_cast<int>(colon) + 2, trim(after, &value_lead)};
    line.value_column += value_lead;

    auto indexed = [&](std::string_view prefix, std::map<int, Line>& into) {
      if (key.rfind(prefix, 0) != 0) return false;
      const std::string_view rest = std::string_view(key).substr(prefix.size());
      if (rest.size() < 3 || rest.front() != '[' || rest.back() != ']') {
        syntax_error(line_no, lead + 1, std::string(prefix) + "[k]");
      }
      const int k = parse_plain_int(Line{line_no, lead + 1, {}}, rest.substr(1, rest.size() - 2));
      if (k < 0) syntax_error(line_no, lead + 1, "non-negative index");
      if (!into.emplace(k, line).second) syntax_error(line_no, lead + 1, "no duplicate " + key);
      return true;
    };
    if (indexed("equation", equation_lines) || indexed("forcing", forcing_lines) ||
        indexed("initial", initial_lines)) {
      if (end == text.size()) break;
      continue;
    }
    static const char* kKeys[] = {"kind", "dim", "components", "domain", "grid",
                                  "constraint", "t_final", "dt"};
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      syntax_error(line_no, lead + 1, "a known key (found '" + key + "')");
    }
    if (!scalars.emplace(key, line).second) syntax_error(line_no, lead + 1, "no duplicate " + key);
    if (end == text.size()) break;
  }

  auto required = [&](const std::string& key) -> const Line& {
    auto it = scalars.find(key);
    if (it == scalars.end()) throw Error(ErrorCode::MissingSection, key);
    return it->second;
  };

  ProblemSpec spec;
  {
    const Line& l = required("kind");
    if (l.value == "stationary") {
      spec.kind = ProblemKind::Stationary;
    } else if (l.value == "evolution") {
      spec.kind = ProblemKind::Evolution;
    } else {
      syntax_error(l.number, l.value_column, "'stationary' or 'evolution'");
    }
  }
  const Line& dim_line = required("dim");
  const int dim = parse_plain_int(dim_line, dim_line.value);
  if (dim < 1 || dim > kMaxDim) syntax_error(dim_line.number, dim_line.value_column, "dim 1, 2 or 3");
  const Line& comp_line = required("components");
  spec.components = parse_plain_int(comp_line, comp_line.value);
  if (spec.components < 1 || spec.components > kMaxComponents) {
    syntax_error(comp_line.number, comp_line.value_column, "component count in [1, 4]");
  }

  std::vector<double> lengths;
  {
    const Line& l = required("domain");
    for (auto tok : split_ws(l.value)) {
      const double v = parse_plain_double(l, tok);
      if (v <= 0.0) syntax_error(l.number, l.value_column, "positive axis length");
      lengths.push_back(v);
    }
    if (static_cast<int>(lengths.size()) != dim) {
      throw Error(ErrorCode::DimensionMismatch, "domain lists " + std::to_string(lengths.size()) +
                                                    " lengths for dim " + std::to_string(dim));
    }
  }
  std::vector<int> points;
  {
    const Line& l = required("grid");
    for (auto tok : split_ws(l.value)) {
      const int g = parse_plain_int(l, tok);
      if (g < kMinGridPoints || g > kMaxGridPoints || (g & (g - 1)) != 0) {
        syntax_error(l.number, l.value_column, "grid size that is a power of two in [8, 256]");
      }
      points.push_back(g);
    }
    if (static_cast<int>(points.size()) != dim) {
      throw Error(ErrorCode::DimensionMismatch, "grid lists " + std::to_string(points.size()) +
                                                    " sizes for dim " + std::to_string(dim));
    }
  }
  spec.grid = Grid(points, lengths);

  if (auto it = scalars.find("constraint"); it != scalars.end()) {
    if (it->second.value == "none") {
      spec.constraint = ConstraintKind::None;
    } else if (it->second.value == "leray") {
      spec.constraint = ConstraintKind::Leray;
    } else {
      syntax_error(it->second.number, it->second.value_column, "'none' or 'leray'");
    }
  }
  if (spec.constraint == ConstraintKind::Leray && spec.components != dim) {
    throw Error(ErrorCode::ConstraintArityMismatch,
                "leray constraint needs components == dim (" + std::to_string(spec.components) +
                    " vs " + std::to_string(dim) + ")");
  }

  auto check_index = [&](const std::map<int, Line>& lines) {
    for (const auto& [k, l] : lines) {
      if (k >= spec.components) {
        throw Error(ErrorCode::ComponentOutOfRange,
                    std::to_string(k) + " (line " + std::to_string(l.number) + ")");
      }
    }
  };
  check_index(equation_lines);
  check_index(forcing_lines);
  check_index(initial_lines);

  spec.equations.resize(spec.components);
  for (int k = 0; k < spec.components; ++k) {
    auto it = equation_lines.find(k);
    if (it == equation_lines.end()) {
      throw Error(ErrorCode::MissingSection, "equation[" + std::to_string(k) + "]");
    }
    const Line& l = it->second;
    const auto eq = l.value.find('=');
    if (eq == std::string_view::npos) syntax_error(l.number, l.value_column + static_cast<int>(l.value.size()), "'='");
    if (l.value.find('=', eq + 1) != std::string_view::npos) {
      syntax_error(l.number, l.value_column + static_cast<int>(l.value.find('=', eq + 1)), "a single '='");
    }
    spec.equations[k].lhs = ExprParser(l.value.substr(0, eq), l.number, l.value_column - 1).parse_all();
    spec.equations[k].rhs =
        ExprParser(l.value.substr(eq + 1), l.number, l.value_column + static_cast<int>(eq)).parse_all();
    validate_expr(*spec.equations[k].lhs, dim, spec.components, l.number);
    validate_expr(*spec.equations[k].rhs, dim, spec.components, l.number);
  }

  spec.forcing.assign(spec.components, nullptr);
  for (const auto& [k, l] : forcing_lines) {
    spec.forcing[k] = ExprParser(l.value, l.number, l.value_column - 1).parse_all();
    validate_expr(*spec.forcing[k], dim, spec.components, l.number);
    require_coordinate_only(*spec.forcing[k], l.number);
  }
  for (int k = 0; k < spec.components; ++k) {
    const bool used = references_forcing(*spec.equations[k].lhs) || references_forcing(*spec.equations[k].rhs);
    if (used) {
      // every f[j] referenced anywhere needs its forcing section
      visit_nodes(*spec.equations[k].lhs, [&](const ExprNode& n) {
        if (const auto* f = std::get_if<ForcingRefNode>(&n.node); f && !spec.forcing[f->index]) {
          throw Error(ErrorCode::MissingSection, "forcing[" + std::to_string(f->index) + "]");
        }
      });
      visit_nodes(*spec.equations[k].rhs, [&](const ExprNode& n) {
        if (const auto* f = std::get_if<ForcingRefNode>(&n.node); f && !spec.forcing[f->index]) {
          throw Error(ErrorCode::MissingSection, "forcing[" + std::to_string(f->index) + "]");
        }
      });
    }
  }

  if (!initial_lines.empty()) {
    spec.initial.assign(spec.components, nullptr);
    for (const auto& [k, l] : initial_lines) {
      spec.initial[k] = ExprParser(l.value, l.number, l.value_column - 1).parse_all();
      validate_expr(*spec.initial[k], dim, spec.components, l.number);
      require_coordinate_only(*spec.initial[k], l.number);
    }
  }
  auto positive_scalar = [&](const std::string& key, double& into) {
    auto it = scalars.find(key);
    if (it == scalars.end()) return false;
    into = parse_plain_double(it->second, it->second.value);
    if (into <= 0.0) syntax_error(it->second.number, it->second.value_column, "value > 0");
    return true;
  };
  const bool has_t = positive_scalar("t_final", spec.t_final);
  const bool has_dt = positive_scalar("dt", spec.dt);
  if (spec.kind == ProblemKind::Evolution) {
    for (int k = 0; k < spec.components; ++k) {
      if (spec.initial.empty() || !spec.initial[k]) {
        throw Error(ErrorCode::MissingSection, "initial[" + std::to_string(k) + "]");
      }
    }
    if (!has_t) throw Error(ErrorCode::MissingSection, "t_final");
    if (!has_dt) throw Error(ErrorCode::MissingSection, "dt");
  }

  spec.split = split_terms(spec.equations, spec.components, dim);
  return spec;
}

std::string print_problem(const ProblemSpec& spec) {
  std::ostringstream out;
  out << "kind: " << (spec.kind == ProblemKind::Stationary ? "stationary" : "evolution") << '\n';
  out << "dim: " << spec.dim() << '\n';
  out << "components: " << spec.components << '\n';
  out << "domain:";
  for (double l : spec.grid.lengths()) out << ' ' << format_double(l);
  out << "\ngrid:";
  for (int g : spec.grid.point_counts()) out << ' ' << g;
  out << "\nconstraint: " << (spec.constraint == ConstraintKind::Leray ? "leray" : "none") << '\n';
  for (int k = 0; k < spec.components; ++k) {
    out << "equation[" << k << "]: " << print_expr(*spec.equations[k].lhs) << " = "
        << print_expr(*spec.equations[k].rhs) << '\n';
  }
  for (int k = 0; k < static_cast<int>(spec.forcing.size()); ++k) {
    if (spec.forcing[k]) out << "forcing[" << k << "]: " << print_expr(*spec.forcing[k]) << '\n';
  }
  for (int k = 0; k < static_cast<int>(spec.initial.size()); ++k) {
    if (spec.initial[k]) out << "initial[" << k << "]: " << print_expr(*spec.initial[k]) << '\n';
  }
  if (spec.t_final > 0.0) out << "t_final: " << format_double(spec.t_final) << '\n';
  if (spec.dt > 0.0) out << "dt: " << format_double(spec.dt) << '\n';
  return out.str();
}

int ProblemSpec::max_derivative_order() const {
  int m = 0;
  for (const auto& eq : equations) {
    m = std::max({m, pdefix::max_derivative_order(*eq.lhs), pdefix::max_derivative_order(*eq.rhs)});
  }
  return m;
}

ProblemSpec with_grid(const ProblemSpec& spec, const Grid& grid) {
  if (grid.dim() != spec.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "grid override has " + std::to_string(grid.dim()) +
                                                  " axes, problem has " + std::to_string(spec.dim()));
  }
  ProblemSpec out = spec;
  out.grid = grid;
  return out;
}

ProblemSpec with_forcing_scale(const ProblemSpec& spec, double scale) {
  ProblemSpec out = spec;
  for (auto& f : out.forcing) {
    if (f) f = make_product({make_constant(scale), f});
  }
  return out;
}

}  // namespace pdefix
