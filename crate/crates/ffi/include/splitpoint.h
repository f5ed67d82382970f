#ifndef SPLITPOINT_H
#define SPLITPOINT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SpStatus {
  SP_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  SP_STATUS_INVALID_ARGUMENT = 1,
  // Bad parameter, domain or configuration.
  SP_STATUS_USAGE = 2,
  // Unusable input data or an I/O failure.
  SP_STATUS_DATA = 3,
  // A numerical routine failed.
  SP_STATUS_NUMERIC = 4,
  // The quantity has no closed form; the output is set to NaN.
  SP_STATUS_NOT_ANALYTIC = 5,
  // An internal panic was caught.
  SP_STATUS_INTERNAL = 6,
} SpStatus;

// Opaque handle to a probability distribution.
typedef struct SpDistribution SpDistribution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next call into this library on the thread.
const char *sp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sp_version(void);

// Closed-form risk of estimator `kind` (e.g. `"B"`) for sample size `n` at
// split `p`. `measure` is one of `mean`, `bias`, `variance`, `mse`, `rmse`,
// `mae`, `rmse_approx`.
//
// # Safety
// `kind` and `measure` must be valid NUL-terminated strings and `out` a
// valid pointer to a double.
enum SpStatus sp_risk(const char *kind, uint32_t n, double p, const char *measure, double *out);

// Large-`n` RMSE approximation.
//
// # Safety
// `kind` must be a valid NUL-terminated string and `out` a valid pointer.
enum SpStatus sp_rmse_approx(const char *kind, uint32_t n, double p, double *out);

// Estimate on the quantile scale from the sufficient statistic: `l` is the
// largest class-1 value (0 if none), `r` the smallest class-0 value (1 if
// none), `k` the class-1 count out of `n`.
//
// # Safety
// `kind` must be a valid NUL-terminated string and `out` a valid pointer.
enum SpStatus sp_estimate(const char *kind,
                          double l,
                          double r,
                          uint32_t k,
                          uint32_t n,
                          double *out);

// The function of `(L, R)` with zero mean for every `p` when `n = 2`.
//
// # Safety
// `out` must be a valid pointer.
enum SpStatus sp_completeness_witness(double l, double r, double *out);

// Parses a distribution such as `"beta(2,10)"` or `"normal"`. Returns null
// on failure. Release with [`sp_distribution_free`].
//
// # Safety
// `spec` must be a valid NUL-terminated string.
struct SpDistribution *sp_distribution_new(const char *spec);

// # Safety
// `dist` must be null or a handle from [`sp_distribution_new`] that has not
// been freed.
void sp_distribution_free(struct SpDistribution *dist);

// # Safety
// `dist` must be a live handle and `out` a valid pointer.
enum SpStatus sp_distribution_cdf(const struct SpDistribution *dist, double x, double *out);

// # Safety
// `dist` must be a live handle and `out` a valid pointer.
enum SpStatus sp_distribution_pdf(const struct SpDistribution *dist, double x, double *out);

// # Safety
// `dist` must be a live handle and `out` a valid pointer.
enum SpStatus sp_distribution_quantile(const struct SpDistribution *dist, double u, double *out);

// Runs a risk-curve simulation from TOML text and returns its CSV in
// `*out_csv`. Release the string with [`sp_string_free`].
//
// # Safety
// `config_toml` must be a valid NUL-terminated string and `out_csv` a
// valid pointer.
enum SpStatus sp_simulate_config(const char *config_toml, char **out_csv);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void sp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPLITPOINT_H */
