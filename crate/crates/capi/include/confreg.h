/* C interface for the confreg confidence-slab estimators. */

#ifndef CONFREG_H
#define CONFREG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Estimator selector for [`confreg_fit`].
 */
typedef enum ConfregMethod {
  CONFREG_METHOD_OLS = 0,
  CONFREG_METHOD_LASSO = 1,
  CONFREG_METHOD_IFS = 2,
  CONFREG_METHOD_IFS_RELAXED = 3,
  CONFREG_METHOD_DANTZIG = 4,
  CONFREG_METHOD_CORRELATION_SELECTOR = 5,
} ConfregMethod;

/**
 * Result of every fallible call.
 */
typedef enum ConfregStatus {
  CONFREG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CONFREG_STATUS_NULL_ARGUMENT = 1,
  /**
   * A parameter was out of range or otherwise unusable.
   */
  CONFREG_STATUS_INVALID_ARGUMENT = 2,
  CONFREG_STATUS_DIMENSION_MISMATCH = 3,
  /**
   * The solver hit its iteration cap without certifying optimality.
   */
  CONFREG_STATUS_NOT_CONVERGED = 4,
  /**
   * The constraint system admits no solution.
   */
  CONFREG_STATUS_INFEASIBLE = 5,
  /**
   * A matrix factorization or other numerical step failed.
   */
  CONFREG_STATUS_NUMERICAL_FAILURE = 6,
} ConfregStatus;

typedef struct ConfregBand ConfregBand;

typedef struct ConfregGeometry ConfregGeometry;

typedef struct ConfregReport ConfregReport;

/**
 * Iterative-solver knobs; obtain defaults from
 * [`confreg_solver_options_default`].
 */
typedef struct ConfregSolverOptions {
  size_t max_iterations;
  double tolerance;
  double kappa;
} ConfregSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent error on this thread into `buffer`
 * (NUL-terminated, truncated to `capacity`). Returns the full message
 * length in bytes, excluding the terminator. A null or empty buffer only
 * queries the length.
 */
size_t confreg_last_error_message(char *buffer, size_t capacity);

/**
 * Builds a geometry from a row-major n×m design matrix.
 */
enum ConfregStatus confreg_geometry_from_design(const double *data,
                                                size_t n,
                                                size_t m,
                                                struct ConfregGeometry **out);

/**
 * Builds a geometry from a row-major symmetric PSD m×m Gram matrix.
 */
enum ConfregStatus confreg_geometry_from_gram(const double *data,
                                              size_t m,
                                              struct ConfregGeometry **out);

/**
 * Rescales every dictionary element to unit general norm. `out_scales`,
 * when non-null, receives the m column scales.
 */
enum ConfregStatus confreg_geometry_normalize(const struct ConfregGeometry *geometry,
                                              struct ConfregGeometry **out,
                                              double *out_scales);

/**
 * Dictionary size m.
 */
size_t confreg_geometry_m(const struct ConfregGeometry *geometry);

/**
 * Sample count n, or 0 for analytic-Gram geometries.
 */
size_t confreg_geometry_n(const struct ConfregGeometry *geometry);

void confreg_geometry_free(struct ConfregGeometry *geometry);

/**
 * Empirical correlations α̃_j = (1/n)Σ_i f_j(X_i)Y_i into `out` (length m).
 */
enum ConfregStatus confreg_correlations(const struct ConfregGeometry *geometry,
                                        const double *response,
                                        size_t response_len,
                                        double *out);

/**
 * Constant practical radii (σ/3)√(log m / n) into `out` (length m); with
 * `as_squared_radius` false (the default interpretation) the value is
 * squared so `out` always carries squared radii ready for
 * [`confreg_band_new`].
 */
enum ConfregStatus confreg_radii_heuristic(size_t m,
                                           size_t n,
                                           double sigma,
                                           bool as_squared_radius,
                                           double *out);

/**
 * Bounded-response squared radii 8K²(1 + log(2m/ε))/n into `out`.
 */
enum ConfregStatus confreg_radii_bounded_response(size_t m,
                                                  size_t n,
                                                  double k,
                                                  double epsilon,
                                                  double *out);

/**
 * Builds a confidence band from slab centers and squared radii (length m).
 */
enum ConfregStatus confreg_band_new(const double *centers,
                                    const double *radii,
                                    size_t m,
                                    double epsilon,
                                    struct ConfregBand **out);

void confreg_band_free(struct ConfregBand *band);

struct ConfregSolverOptions confreg_solver_options_default(void);

/**
 * Fits a band-driven estimator. OLS is not available here; it consumes a
 * response instead of a band; use [`confreg_fit_ols`].
 */
enum ConfregStatus confreg_fit(const struct ConfregGeometry *geometry,
                               const struct ConfregBand *band,
                               enum ConfregMethod method,
                               const struct ConfregSolverOptions *options,
                               struct ConfregReport **out);

/**
 * Ordinary least squares on an empirical-design geometry.
 */
enum ConfregStatus confreg_fit_ols(const struct ConfregGeometry *geometry,
                                   const double *response,
                                   size_t response_len,
                                   struct ConfregReport **out);

/**
 * Number of coefficients in the report.
 */
size_t confreg_report_len(const struct ConfregReport *report);

/**
 * Copies the fitted coefficients into `out` (capacity `len`; must be at
 * least [`confreg_report_len`]).
 */
enum ConfregStatus confreg_report_coefficients(const struct ConfregReport *report,
                                               double *out,
                                               size_t len);

size_t confreg_report_iterations(const struct ConfregReport *report);

bool confreg_report_converged(const struct ConfregReport *report);

size_t confreg_report_nonzero_count(const struct ConfregReport *report);

enum ConfregMethod confreg_report_method(const struct ConfregReport *report);

void confreg_report_free(struct ConfregReport *report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONFREG_H */
