#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pdefix/field.hpp"
#include "pdefix/problem.hpp"

namespace pdefix {

/// Exact solution at time t (t is ignored by stationary problems).
using ExactSampler = std::function<SpectralField(const Grid&, double)>;

struct BuiltinProblem {
  std::string name;
  /// Problem-file text the spec was parsed from.
  std::string text;
  ProblemSpec spec;
  /// Empty when no closed form is known.
  ExactSampler exact;
};

/// heat1d, cubic1d, burgers1d, burgers1d-evolution, taylor-green-2d.
std::vector<std::string> builtin_names();

/// Throws UnknownProblem.
BuiltinProblem builtin_problem(std::string_view name);

}  // namespace pdefix
