#ifndef DILUTE_H
#define DILUTE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DiluteStatus {
  DILUTE_STATUS_OK = 0,
  DILUTE_STATUS_NULL_POINTER = 1,
  /**
   * Argument outside the operation's domain.
   */
  DILUTE_STATUS_CONTRACT = 2,
  /**
   * Unparsable or inconsistent parameters.
   */
  DILUTE_STATUS_CONFIG = 3,
  /**
   * Two independent computations disagreed.
   */
  DILUTE_STATUS_INCONSISTENCY = 4,
  DILUTE_STATUS_IO = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  DILUTE_STATUS_PANIC = 6,
} DiluteStatus;

typedef enum DiluteSeriesKind {
  DILUTE_SERIES_KIND_MOMENT = 0,
  DILUTE_SERIES_KIND_CATALAN = 1,
  DILUTE_SERIES_KIND_PHI12 = 2,
  DILUTE_SERIES_KIND_PHI22 = 3,
} DiluteSeriesKind;

/**
 * Opaque `(n, rho, V_2, V_4, ...)` for the exact moment engine.
 */
typedef struct DiluteMomentParams DiluteMomentParams;

/**
 * Opaque truncated power series with coefficients polynomial in `u`.
 */
typedef struct DiluteSeries DiluteSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *dilute_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void dilute_string_free(char *s);

/**
 * Solves a series up to `order`. `u` is an optional rational such as
 * `"1/10"`; null keeps `u` symbolic. `u` is only accepted for the moment
 * series.
 *
 * # Safety
 * `u` must be null or a valid C string; `out` must be writable.
 */
enum DiluteStatus dilute_series_new(enum DiluteSeriesKind kind,
                                    size_t order,
                                    const char *u,
                                    struct DiluteSeries **out);

/**
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum DiluteStatus dilute_series_order(const struct DiluteSeries *series, size_t *out);

/**
 * Coefficient of `z^s` as comma-separated `num/den` coefficients of
 * `u^0, u^1, ...`.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable. The string is
 * released with [`dilute_string_free`].
 */
enum DiluteStatus dilute_series_coefficient(const struct DiluteSeries *series,
                                            size_t s,
                                            char **out);

/**
 * Coefficient of `z^s` at the rational `u`, as `num/den`.
 *
 * # Safety
 * `series` must be a live handle, `u` a valid C string, `out` writable.
 */
enum DiluteStatus dilute_series_evaluate(const struct DiluteSeries *series,
                                         size_t s,
                                         const char *u,
                                         char **out);

/**
 * # Safety
 * `series` must come from [`dilute_series_new`] or be null.
 */
void dilute_series_free(struct DiluteSeries *series);

/**
 * `n`, `rho` and `count` moments `V_2, V_4, ...`, each a rational string.
 *
 * # Safety
 * `rho` must be a valid C string, `moments` an array of `count` valid C
 * strings (or null when `count` is 0), `out` writable.
 */
enum DiluteStatus dilute_moment_params_new(uint64_t n,
                                           const char *rho,
                                           const char *const *moments,
                                           size_t count,
                                           struct DiluteMomentParams **out);

/**
 * Exact `E Tr H^{2s}` as `num/den`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum DiluteStatus dilute_exact_moment(const struct DiluteMomentParams *params,
                                      size_t s,
                                      char **out);

/**
 * # Safety
 * `params` must come from [`dilute_moment_params_new`] or be null.
 */
void dilute_moment_params_free(struct DiluteMomentParams *params);

/**
 * Monte Carlo estimates of `E Tr H^{2s}` for `s = 1..=s_max`, written to
 * `means[s-1]` and `stderrs[s-1]`. `dist` is `rademacher`, `uniform` or
 * `two-point`; `q` is required for `two-point` and null otherwise.
 *
 * # Safety
 * String arguments must be valid C strings (or null where allowed);
 * `means` and `stderrs` must each hold `s_max` doubles.
 */
enum DiluteStatus dilute_mc_moments(size_t n,
                                    const char *rho,
                                    const char *dist,
                                    const char *q,
                                    size_t samples,
                                    uint64_t seed,
                                    size_t s_max,
                                    double *means,
                                    double *stderrs);

/**
 * Runs the quick identity suite. Returns `Inconsistency` naming the first
 * failing identity.
 */
enum DiluteStatus dilute_selfcheck_quick(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DILUTE_H */
