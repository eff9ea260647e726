#ifndef WARPBAND_H
#define WARPBAND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_POINTER = 1,
  WB_STATUS_INVALID_ARGUMENT = 2,
  WB_STATUS_IO = 3,
  WB_STATUS_FORMAT = 4,
  /**
   * Under-determined, rank-deficient or otherwise unsolvable fit.
   */
  WB_STATUS_NUMERICAL = 5,
  /**
   * Zero noise variance where a band needs a positive one.
   */
  WB_STATUS_DEGENERATE_POSTERIOR = 6,
  WB_STATUS_BUFFER_TOO_SMALL = 7,
  WB_STATUS_PANIC = 8,
} WbStatus;

typedef struct WbBand WbBand;

typedef struct WbEnsemble WbEnsemble;

typedef struct WbModel WbModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *wb_last_error_message(void);

/**
 * Fits a full polynomial of `degree` to `n` runs. `x` is `n x d`, `y` is
 * `n x m`; `lower`/`upper` give the input box. Outputs are named `y1..ym`
 * and inputs `x1..xd`.
 *
 * # Safety
 * Pointers must reference arrays of the stated sizes; `out` must be writable.
 */
enum WbStatus wb_model_fit(const double *x,
                           size_t n,
                           size_t d,
                           const double *y,
                           size_t m,
                           const double *lower,
                           const double *upper,
                           uint32_t degree,
                           struct WbModel **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum WbStatus wb_model_load(const char *path, struct WbModel **out);

/**
 * # Safety
 * `model` must come from this library; `path` must be NUL-terminated.
 */
enum WbStatus wb_model_save(const struct WbModel *model, const char *path);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void wb_model_free(struct WbModel *model);

/**
 * Writes runs, inputs, outputs and basis size; any pointer may be null.
 *
 * # Safety
 * `model` must come from this library.
 */
enum WbStatus wb_model_dims(const struct WbModel *model,
                            size_t *n,
                            size_t *d,
                            size_t *m,
                            size_t *p);

/**
 * Noise variance estimate of output `l`.
 *
 * # Safety
 * `model` must come from this library; `out` must be writable.
 */
enum WbStatus wb_model_sigma2(const struct WbModel *model, size_t l, double *out);

/**
 * Posterior mean and prediction standard deviation of output `l` at a
 * physical point; `sd` may be null.
 *
 * # Safety
 * `x` must hold `d` values.
 */
enum WbStatus wb_model_predict(const struct WbModel *model,
                               const double *x,
                               size_t d,
                               size_t l,
                               double *mean,
                               double *sd);

/**
 * Minimizes the (weighted) sum of squared outputs under the point estimates.
 * `weights` may be null for equal weights; `x_out` receives `d` values.
 *
 * # Safety
 * Array pointers must match the model's dimensions.
 */
enum WbStatus wb_optimize(const struct WbModel *model,
                          const double *weights,
                          uint64_t seed,
                          double *x_out,
                          size_t d,
                          double *objective_out);

/**
 * Optimal decisions under `r` posterior draws.
 *
 * # Safety
 * `weights` is null or holds one value per output; `out` must be writable.
 */
enum WbStatus wb_ensemble_run(const struct WbModel *model,
                              const double *weights,
                              size_t r,
                              uint64_t seed,
                              bool hierarchical,
                              struct WbEnsemble **out);

/**
 * # Safety
 * `ens` must come from this library.
 */
enum WbStatus wb_ensemble_len(const struct WbEnsemble *ens, size_t *out);

/**
 * Copies the `R x d` decisions into `buf` (capacity `len` values).
 *
 * # Safety
 * `buf` must hold `len` writable values.
 */
enum WbStatus wb_ensemble_decisions(const struct WbEnsemble *ens, double *buf, size_t len);

/**
 * Median and quartiles of dimension `k` over converged draws.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum WbStatus wb_ensemble_quantiles(const struct WbEnsemble *ens,
                                    size_t k,
                                    double *median,
                                    double *q25,
                                    double *q75);

/**
 * # Safety
 * `ens` must come from this library and not be used afterwards.
 */
void wb_ensemble_free(struct WbEnsemble *ens);

/**
 * Standardized confidence band of output `l` over dims `(free_a, free_b)`,
 * the other dims fixed at the physical values in `fixed` (in index order).
 *
 * # Safety
 * `fixed` must hold `n_fixed` values; `out` must be writable.
 */
enum WbStatus wb_band_compute(const struct WbModel *model,
                              size_t l,
                              size_t free_a,
                              size_t free_b,
                              const double *fixed,
                              size_t n_fixed,
                              size_t resolution,
                              double alpha,
                              double eps,
                              size_t r,
                              uint64_t seed,
                              struct WbBand **out);

/**
 * # Safety
 * `band` must come from this library.
 */
enum WbStatus wb_band_resolution(const struct WbBand *band, size_t *nx, size_t *ny);

/**
 * Coverage fractions, `ny` rows of `nx` values.
 *
 * # Safety
 * `buf` must hold `len` writable values.
 */
enum WbStatus wb_band_coverage(const struct WbBand *band, double *buf, size_t len);

/**
 * Band membership (0 or 1), same layout as [`wb_band_coverage`].
 *
 * # Safety
 * `buf` must hold `len` writable bytes.
 */
enum WbStatus wb_band_mask(const struct WbBand *band, uint8_t *buf, size_t len);

/**
 * # Safety
 * `band` must come from this library and not be used afterwards.
 */
void wb_band_free(struct WbBand *band);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPBAND_H */
