#ifndef PASTENT_H
#define PASTENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PastentMeasure {
  PASTENT_MEASURE_SHANNON = 0,
  PASTENT_MEASURE_RESIDUAL = 1,
  PASTENT_MEASURE_PAST_DIRECT = 2,
  PASTENT_MEASURE_PAST_PIT = 3,
  PASTENT_MEASURE_PAST_CONDEXP = 4,
  PASTENT_MEASURE_REVERSED_HAZARD = 5,
} PastentMeasure;

typedef enum PastentStatus {
  PASTENT_STATUS_OK = 0,
  PASTENT_STATUS_NULL_POINTER = 1,
  PASTENT_STATUS_INVALID_PARAMETER = 2,
  PASTENT_STATUS_PARSE = 3,
  PASTENT_STATUS_DOMAIN = 4,
  PASTENT_STATUS_DEGENERATE = 5,
  PASTENT_STATUS_PRECONDITION = 6,
  PASTENT_STATUS_INSUFFICIENT_DATA = 7,
  /**
   * Quadrature, root finding or reconstruction did not reach tolerance.
   */
  PASTENT_STATUS_NUMERICAL = 8,
  PASTENT_STATUS_IO = 9,
  PASTENT_STATUS_PANIC = 10,
} PastentStatus;

typedef enum PastentVerdictKind {
  PASTENT_VERDICT_KIND_PREMISES_FAIL = 0,
  PASTENT_VERDICT_KIND_CONSISTENT = 1,
  PASTENT_VERDICT_KIND_COUNTEREXAMPLE_CANDIDATE = 2,
} PastentVerdictKind;

/**
 * Opaque lifetime distribution.
 */
typedef struct PastentDistribution PastentDistribution;

/**
 * Opaque reconstruction result.
 */
typedef struct PastentReconstruction PastentReconstruction;

typedef struct PastentQuadConfig {
  double abs_tol;
  double rel_tol;
  uint32_t max_depth;
  double tail_cut;
} PastentQuadConfig;

typedef struct PastentVerdict {
  double t0;
  double cdf_gap;
  double entropy_gap;
  double mismatch;
  double conclusion_distance;
  enum PastentVerdictKind verdict;
} PastentVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pastent_last_error_message(void);

/**
 * Default quadrature tolerances.
 */
struct PastentQuadConfig pastent_quad_config_default(void);

/**
 * Parses a spec such as `weibull:shape=2,scale=1`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PastentStatus pastent_distribution_parse(const char *spec, struct PastentDistribution **out);

/**
 * # Safety
 * `dist` must come from `pastent_distribution_parse` and not be freed twice.
 */
void pastent_distribution_free(struct PastentDistribution *dist);

/**
 * Writes the canonical spec text into `buf` (NUL-terminated, truncated to
 * `len`) and returns the full length without the terminator.
 *
 * # Safety
 * `dist` must be valid; `buf` must hold `len` bytes or be NULL with `len` 0.
 */
size_t pastent_distribution_spec(const struct PastentDistribution *dist, char *buf, size_t len);

/**
 * # Safety
 * `dist` and `out` must be valid pointers.
 */
enum PastentStatus pastent_pdf(const struct PastentDistribution *dist, double x, double *out);

/**
 * # Safety
 * `dist` and `out` must be valid pointers.
 */
enum PastentStatus pastent_cdf(const struct PastentDistribution *dist, double x, double *out);

/**
 * # Safety
 * `dist` and `out` must be valid pointers.
 */
enum PastentStatus pastent_quantile(const struct PastentDistribution *dist, double u, double *out);

/**
 * Evaluates one measure at `t`. `cfg` may be NULL for defaults.
 *
 * # Safety
 * `dist` and `out` must be valid; `cfg` valid or NULL.
 */
enum PastentStatus pastent_measure_eval(const struct PastentDistribution *dist,
                                        enum PastentMeasure measure,
                                        double t,
                                        const struct PastentQuadConfig *cfg,
                                        double *out);

/**
 * Single-point uniqueness check for a pair of laws. `cfg` may be NULL.
 *
 * # Safety
 * `x`, `y` and `out` must be valid; `cfg` valid or NULL.
 */
enum PastentStatus pastent_theorem_check(const struct PastentDistribution *x,
                                         const struct PastentDistribution *y,
                                         double t0,
                                         double premise_tol,
                                         double separation_tol,
                                         const struct PastentQuadConfig *cfg,
                                         struct PastentVerdict *out);

/**
 * Reconstructs the reversed hazard and distribution function from a
 * past-entropy curve sampled at `n` increasing times, with default settings.
 *
 * # Safety
 * `t` and `values` must point to `n` doubles each; `out` must be valid.
 */
enum PastentStatus pastent_reconstruct(const double *t,
                                       const double *values,
                                       size_t n,
                                       double anchor_t,
                                       double anchor_cdf,
                                       struct PastentReconstruction **out);

/**
 * # Safety
 * `r` must come from `pastent_reconstruct` and not be freed twice.
 */
void pastent_reconstruction_free(struct PastentReconstruction *r);

/**
 * Number of grid points, 0 for NULL.
 *
 * # Safety
 * `r` must be valid or NULL.
 */
size_t pastent_reconstruction_len(const struct PastentReconstruction *r);

/**
 * Row `i` of the reconstruction. Any out-pointer may be NULL.
 *
 * # Safety
 * `r` must be valid; non-NULL out-pointers must be writable.
 */
enum PastentStatus pastent_reconstruction_row(const struct PastentReconstruction *r,
                                              size_t i,
                                              double *t,
                                              double *phi,
                                              double *cdf);

/**
 * Largest self-check residual, NaN for NULL.
 *
 * # Safety
 * `r` must be valid or NULL.
 */
double pastent_reconstruction_selfcheck(const struct PastentReconstruction *r);

/**
 * Whether both hazard branches passed the anchor trial.
 *
 * # Safety
 * `r` must be valid or NULL.
 */
bool pastent_reconstruction_branch_ambiguous(const struct PastentReconstruction *r);

/**
 * Spacings estimate of the past entropy at `t`. `window` 0 picks the default.
 *
 * # Safety
 * `values` must point to `n` doubles; `out` must be valid.
 */
enum PastentStatus pastent_estimate_past_entropy(const double *values,
                                                 size_t n,
                                                 double t,
                                                 size_t window,
                                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PASTENT_H */
