#include "pdefix/pdefix.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "pdefix/builtins.hpp"
#include "pdefix/errors.hpp"
#include "pdefix/field_io.hpp"
#include "pdefix/picard.hpp"
#include "pdefix/verifier.hpp"

struct pdefix_problem {
  pdefix::ProblemSpec spec;
  pdefix::ExactSampler exact;
};

struct pdefix_field {
  pdefix::SpectralField field;
};

struct pdefix_result {
  pdefix_field field;
  pdefix::ConvergenceTrace trace;
};

namespace {

thread_local std::string g_last_error;

pdefix_status to_status(pdefix::ErrorCode code) {
  using pdefix::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return PDEFIX_INVALID_ARGUMENT;
    case ErrorCode::IoError: return PDEFIX_IO_ERROR;
    case ErrorCode::DimensionMismatch: return PDEFIX_DIMENSION_MISMATCH;
    case ErrorCode::SyntaxError: return PDEFIX_SYNTAX_ERROR;
    case ErrorCode::ComponentOutOfRange: return PDEFIX_COMPONENT_OUT_OF_RANGE;
    case ErrorCode::MissingSection: return PDEFIX_MISSING_SECTION;
    case ErrorCode::UnsupportedTerm: return PDEFIX_UNSUPPORTED_TERM;
    case ErrorCode::ZeroModeSingular: return PDEFIX_ZERO_MODE_SINGULAR;
    case ErrorCode::IllConditioned: return PDEFIX_ILL_CONDITIONED;
    case ErrorCode::ConstraintArityMismatch: return PDEFIX_CONSTRAINT_ARITY_MISMATCH;
    case ErrorCode::SlabNonConvergence: return PDEFIX_SLAB_NON_CONVERGENCE;
    case ErrorCode::DivergenceDetected: return PDEFIX_DIVERGENCE_DETECTED;
    case ErrorCode::MaxIterExceeded: return PDEFIX_MAX_ITER_EXCEEDED;
    case ErrorCode::InsufficientData: return PDEFIX_INSUFFICIENT_DATA;
    case ErrorCode::OracleNonConvergence: return PDEFIX_ORACLE_NON_CONVERGENCE;
    case ErrorCode::TooManyUnknowns: return PDEFIX_TOO_MANY_UNKNOWNS;
    case ErrorCode::ShapeMismatch: return PDEFIX_SHAPE_MISMATCH;
    case ErrorCode::UnknownProblem: return PDEFIX_UNKNOWN_PROBLEM;
  }
  return PDEFIX_INTERNAL_ERROR;
}

pdefix_status fail(pdefix_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class F>
pdefix_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PDEFIX_OK;
  } catch (const pdefix::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PDEFIX_INTERNAL_ERROR, "InternalError: out of memory");
  } catch (const std::exception& e) {
    return fail(PDEFIX_INTERNAL_ERROR, std::string("InternalError: ") + e.what());
  }
}

pdefix_status null_argument(const char* name) {
  return fail(PDEFIX_INVALID_ARGUMENT, std::string("InvalidArgument: ") + name + " is null");
}

}  // namespace

extern "C" {

const char* pdefix_status_name(pdefix_status status) {
  switch (status) {
    case PDEFIX_OK: return "OK";
    case PDEFIX_INTERNAL_ERROR: return "InternalError";
    default: break;
  }
  if (status < PDEFIX_OK || status > PDEFIX_INTERNAL_ERROR) return "Unknown";
  static constexpr pdefix::ErrorCode kCodes[] = {
      pdefix::ErrorCode::InvalidArgument,      pdefix::ErrorCode::IoError,
      pdefix::ErrorCode::DimensionMismatch,    pdefix::ErrorCode::SyntaxError,
      pdefix::ErrorCode::ComponentOutOfRange,  pdefix::ErrorCode::MissingSection,
      pdefix::ErrorCode::UnsupportedTerm,      pdefix::ErrorCode::ZeroModeSingular,
      pdefix::ErrorCode::IllConditioned,       pdefix::ErrorCode::ConstraintArityMismatch,
      pdefix::ErrorCode::SlabNonConvergence,   pdefix::ErrorCode::DivergenceDetected,
      pdefix::ErrorCode::MaxIterExceeded,      pdefix::ErrorCode::InsufficientData,
      pdefix::ErrorCode::OracleNonConvergence, pdefix::ErrorCode::TooManyUnknowns,
      pdefix::ErrorCode::ShapeMismatch,        pdefix::ErrorCode::UnknownProblem,
  };
  return pdefix::error_name(kCodes[status - 1]).data();
}

const char* pdefix_last_error(void) { return g_last_error.c_str(); }

pdefix_status pdefix_problem_parse(const char* text, pdefix_problem** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new pdefix_problem{pdefix::parse_problem(text), {}}; });
}

pdefix_status pdefix_problem_load(const char* path, pdefix_problem** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const std::string text = pdefix::read_text_file(path);
    try {
      *out = new pdefix_problem{pdefix::parse_problem(text), {}};
    } catch (const pdefix::Error& e) {
      throw pdefix::Error(e.code(), std::string(e.what()).substr(pdefix::error_name(e.code()).size() + 2) +
                                        " in '" + path + "'");
    }
  });
}

pdefix_status pdefix_problem_builtin(const char* name, pdefix_problem** out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto b = pdefix::builtin_problem(name);
    *out = new pdefix_problem{std::move(b.spec), std::move(b.exact)};
  });
}

void pdefix_problem_free(pdefix_problem* problem) { delete problem; }

int pdefix_problem_dim(const pdefix_problem* problem) { return problem ? problem->spec.dim() : 0; }

int pdefix_problem_components(const pdefix_problem* problem) {
  return problem ? problem->spec.components : 0;
}

int pdefix_problem_is_evolution(const pdefix_problem* problem) {
  return problem && problem->spec.kind == pdefix::ProblemKind::Evolution ? 1 : 0;
}

int pdefix_problem_has_exact(const pdefix_problem* problem) {
  return problem && problem->exact ? 1 : 0;
}

pdefix_status pdefix_problem_set_grid(pdefix_problem* problem, const int* points, int count) {
  if (!problem) return null_argument("problem");
  if (!points) return null_argument("points");
  return guarded([&] {
    if (count != problem->spec.dim()) {
      throw pdefix::Error(pdefix::ErrorCode::DimensionMismatch,
                          "grid override lists " + std::to_string(count) + " sizes for dim " +
                              std::to_string(problem->spec.dim()));
    }
    pdefix::Grid grid(std::vector<int>(points, points + count), problem->spec.grid.lengths());
    problem->spec = pdefix::with_grid(problem->spec, grid);
  });
}

pdefix_status pdefix_problem_scale_forcing(pdefix_problem* problem, double scale) {
  if (!problem) return null_argument("problem");
  return guarded([&] { problem->spec = pdefix::with_forcing_scale(problem->spec, scale); });
}

pdefix_status pdefix_problem_print(const pdefix_problem* problem, char* buf, size_t capacity, size_t* needed) {
  if (!problem) return null_argument("problem");
  return guarded([&] {
    const std::string text = pdefix::print_problem(problem->spec);
    if (needed) *needed = text.size() + 1;
    if (buf && capacity > text.size()) std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

void pdefix_solver_options_default(pdefix_solver_options* opts) {
  if (!opts) return;
  const pdefix::SolverOptions d;
  opts->tol = d.tol;
  opts->max_iter = d.max_iter;
  opts->damping = d.damping;
  opts->divergence_window = d.divergence_window;
  opts->norm = d.norm == pdefix::NormKind::L2 ? PDEFIX_NORM_L2 : PDEFIX_NORM_LINF;
}

pdefix_status pdefix_solve(const pdefix_problem* problem, const pdefix_solver_options* opts,
                           pdefix_result** out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    pdefix::SolverOptions o;
    if (opts) {
      o.tol = opts->tol;
      o.max_iter = opts->max_iter;
      o.damping = opts->damping;
      o.divergence_window = opts->divergence_window;
      o.norm = opts->norm == PDEFIX_NORM_LINF ? pdefix::NormKind::Linf : pdefix::NormKind::L2;
    }
    auto result = pdefix::picard_solve(problem->spec, pdefix::default_initial_iterate(problem->spec), o);
    *out = new pdefix_result{pdefix_field{std::move(result.solution)}, std::move(result.trace)};
  });
}

void pdefix_result_free(pdefix_result* result) { delete result; }

const pdefix_field* pdefix_result_field(const pdefix_result* result) {
  return result ? &result->field : nullptr;
}

int pdefix_result_iterations(const pdefix_result* result) {
  return result ? static_cast<int>(result->trace.size()) : 0;
}

pdefix_status pdefix_result_iteration(const pdefix_result* result, int index, pdefix_iteration* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("out");
  if (index < 0 || index >= static_cast<int>(result->trace.size())) {
    return fail(PDEFIX_INVALID_ARGUMENT, "InvalidArgument: iteration index out of range");
  }
  const auto& rec = result->trace.records[index];
  out->iteration = rec.iteration;
  out->update_norm = rec.update_norm;
  out->residual_norm = rec.residual_norm;
  out->has_contraction = rec.contraction ? 1 : 0;
  out->contraction = rec.contraction.value_or(0.0);
  return PDEFIX_OK;
}

pdefix_status pdefix_result_contraction(const pdefix_result* result, int* has_value, double* value) {
  if (!result) return null_argument("result");
  if (!has_value || !value) return null_argument("output");
  return guarded([&] {
    const auto q = pdefix::estimate_contraction(result->trace);
    *has_value = q ? 1 : 0;
    *value = q.value_or(0.0);
  });
}

pdefix_status pdefix_result_write_report(const pdefix_result* result, const char* path) {
  if (!result) return null_argument("result");
  if (!path) return null_argument("path");
  return guarded([&] { pdefix::write_report_csv(result->trace, path); });
}

pdefix_status pdefix_field_read_csv(const char* path, pdefix_field** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new pdefix_field{pdefix::read_field_csv(path)}; });
}

void pdefix_field_free(pdefix_field* field) { delete field; }

int pdefix_field_dim(const pdefix_field* field) { return field ? field->field.dim() : 0; }

int pdefix_field_components(const pdefix_field* field) { return field ? field->field.components() : 0; }

size_t pdefix_field_points(const pdefix_field* field) { return field ? field->field.points() : 0; }

const double* pdefix_field_values(const pdefix_field* field, int component) {
  if (!field || component < 0 || component >= field->field.components()) return nullptr;
  return field->field.physical(component).data();
}

pdefix_status pdefix_field_write_csv(const pdefix_field* field, const char* path) {
  if (!field) return null_argument("field");
  if (!path) return null_argument("path");
  return guarded([&] { pdefix::write_field_csv(field->field, path); });
}

pdefix_status pdefix_field_write_pgm(const pdefix_field* field, int component, const char* path) {
  if (!field) return null_argument("field");
  if (!path) return null_argument("path");
  return guarded([&] { pdefix::write_pgm(field->field, component, path); });
}

pdefix_status pdefix_problem_exact(const pdefix_problem* problem, double t, pdefix_field** out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (!problem->exact) {
      throw pdefix::Error(pdefix::ErrorCode::InvalidArgument, "problem has no exact solution");
    }
    const double time = t < 0.0 ? problem->spec.t_final : t;
    *out = new pdefix_field{problem->exact(problem->spec.grid, time)};
  });
}

pdefix_status pdefix_verify(const pdefix_problem* problem, const pdefix_field* field,
                            pdefix_residual_report* out) {
  if (!problem) return null_argument("problem");
  if (!field) return null_argument("field");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (!field->field.same_shape(pdefix::SpectralField::zeros(problem->spec.grid, problem->spec.components))) {
      throw pdefix::Error(pdefix::ErrorCode::ShapeMismatch, "solution grid/components differ from the problem");
    }
    const auto report = pdefix::differential_residual(problem->spec, field->field);
    *out = pdefix_residual_report{};
    out->equations = static_cast<int>(report.linf.size());
    for (std::size_t k = 0; k < report.linf.size(); ++k) {
      out->linf[k] = report.linf[k];
      out->l2[k] = report.l2[k];
    }
    out->overall_max = report.overall_max;
  });
}

}  // extern "C"
