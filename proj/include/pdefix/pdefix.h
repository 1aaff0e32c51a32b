/*
 * pdefix C interface.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a pdefix_status;
 * on failure pdefix_last_error() holds a message for the calling thread
 * that starts with the status name (e.g. "DivergenceDetected: ...").
 */
#ifndef PDEFIX_PDEFIX_H
#define PDEFIX_PDEFIX_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(PDEFIX_BUILDING_LIBRARY)
#    define PDEFIX_API __declspec(dllexport)
#  else
#    define PDEFIX_API __declspec(dllimport)
#  endif
#else
#  define PDEFIX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdefix_status {
  PDEFIX_OK = 0,
  PDEFIX_INVALID_ARGUMENT,
  PDEFIX_IO_ERROR,
  PDEFIX_DIMENSION_MISMATCH,
  PDEFIX_SYNTAX_ERROR,
  PDEFIX_COMPONENT_OUT_OF_RANGE,
  PDEFIX_MISSING_SECTION,
  PDEFIX_UNSUPPORTED_TERM,
  PDEFIX_ZERO_MODE_SINGULAR,
  PDEFIX_ILL_CONDITIONED,
  PDEFIX_CONSTRAINT_ARITY_MISMATCH,
  PDEFIX_SLAB_NON_CONVERGENCE,
  PDEFIX_DIVERGENCE_DETECTED,
  PDEFIX_MAX_ITER_EXCEEDED,
  PDEFIX_INSUFFICIENT_DATA,
  PDEFIX_ORACLE_NON_CONVERGENCE,
  PDEFIX_TOO_MANY_UNKNOWNS,
  PDEFIX_SHAPE_MISMATCH,
  PDEFIX_UNKNOWN_PROBLEM,
  PDEFIX_INTERNAL_ERROR
} pdefix_status;

typedef struct pdefix_problem pdefix_problem;
typedef struct pdefix_field pdefix_field;
typedef struct pdefix_result pdefix_result;

typedef enum pdefix_norm { PDEFIX_NORM_L2 = 0, PDEFIX_NORM_LINF = 1 } pdefix_norm;

typedef struct pdefix_solver_options {
  double tol;
  int max_iter;
  double damping;
  int divergence_window;
  pdefix_norm norm;
} pdefix_solver_options;

typedef struct pdefix_iteration {
  int iteration;
  double update_norm;
  double residual_norm;
  int has_contraction;
  double contraction;
} pdefix_iteration;

#define PDEFIX_MAX_EQUATIONS 4

typedef struct pdefix_residual_report {
  int equations;
  double linf[PDEFIX_MAX_EQUATIONS];
  double l2[PDEFIX_MAX_EQUATIONS];
  double overall_max;
} pdefix_residual_report;

PDEFIX_API const char* pdefix_status_name(pdefix_status status);
PDEFIX_API const char* pdefix_last_error(void);

/* Problems */
PDEFIX_API pdefix_status pdefix_problem_parse(const char* text, pdefix_problem** out);
PDEFIX_API pdefix_status pdefix_problem_load(const char* path, pdefix_problem** out);
PDEFIX_API pdefix_status pdefix_problem_builtin(const char* name, pdefix_problem** out);
PDEFIX_API void pdefix_problem_free(pdefix_problem* problem);
PDEFIX_API int pdefix_problem_dim(const pdefix_problem* problem);
PDEFIX_API int pdefix_problem_components(const pdefix_problem* problem);
PDEFIX_API int pdefix_problem_is_evolution(const pdefix_problem* problem);
PDEFIX_API int pdefix_problem_has_exact(const pdefix_problem* problem);
/* Replace the grid; count must equal the problem dimension. */
PDEFIX_API pdefix_status pdefix_problem_set_grid(pdefix_problem* problem, const int* points, int count);
/* Multiply every forcing expression by scale. */
PDEFIX_API pdefix_status pdefix_problem_scale_forcing(pdefix_problem* problem, double scale);
/* Writes the problem text (NUL-terminated) into buf when it fits; *needed
 * receives the required size including the terminator. */
PDEFIX_API pdefix_status pdefix_problem_print(const pdefix_problem* problem, char* buf, size_t capacity,
                                              size_t* needed);

/* Solving */
PDEFIX_API void pdefix_solver_options_default(pdefix_solver_options* opts);
PDEFIX_API pdefix_status pdefix_solve(const pdefix_problem* problem, const pdefix_solver_options* opts,
                                      pdefix_result** out);
PDEFIX_API void pdefix_result_free(pdefix_result* result);
/* Borrowed; valid while the result lives. */
PDEFIX_API const pdefix_field* pdefix_result_field(const pdefix_result* result);
PDEFIX_API int pdefix_result_iterations(const pdefix_result* result);
PDEFIX_API pdefix_status pdefix_result_iteration(const pdefix_result* result, int index, pdefix_iteration* out);
/* Fails with PDEFIX_INSUFFICIENT_DATA below three iterations; *has_value is
 * 0 when no ratio is defined. */
PDEFIX_API pdefix_status pdefix_result_contraction(const pdefix_result* result, int* has_value, double* value);
PDEFIX_API pdefix_status pdefix_result_write_report(const pdefix_result* result, const char* path);

/* Fields */
PDEFIX_API pdefix_status pdefix_field_read_csv(const char* path, pdefix_field** out);
PDEFIX_API void pdefix_field_free(pdefix_field* field);
PDEFIX_API int pdefix_field_dim(const pdefix_field* field);
PDEFIX_API int pdefix_field_components(const pdefix_field* field);
PDEFIX_API size_t pdefix_field_points(const pdefix_field* field);
/* Physical values of one component, grid.size() entries, row-major. */
PDEFIX_API const double* pdefix_field_values(const pdefix_field* field, int component);
PDEFIX_API pdefix_status pdefix_field_write_csv(const pdefix_field* field, const char* path);
PDEFIX_API pdefix_status pdefix_field_write_pgm(const pdefix_field* field, int component, const char* path);
/* Exact solution of a builtin at time t (final time for evolution when t < 0). */
PDEFIX_API pdefix_status pdefix_problem_exact(const pdefix_problem* problem, double t, pdefix_field** out);

/* Verification */
PDEFIX_API pdefix_status pdefix_verify(const pdefix_problem* problem, const pdefix_field* field,
                                       pdefix_residual_report* out);

#ifdef __cplusplus
}
#endif

#endif /* PDEFIX_PDEFIX_H */
