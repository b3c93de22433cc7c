#ifndef SAGNAC_FFI_H
#define SAGNAC_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum SagnacStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidArgument = 2,
  ParseError = 3,
  Degenerate = 4,
} SagnacStatus;

/**
 * Coincidence evaluation mode.
 */
typedef enum SagnacMode {
  PostSelected = 0,
  Classical = 1,
} SagnacMode;

/**
 * Which detector a singles query refers to.
 */
typedef enum SagnacDetector {
  Signal = 0,
  Idler = 1,
} SagnacDetector;

/**
 * Opaque source-configuration handle.
 */
typedef struct SagnacConfig SagnacConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a config with default parameters. Never fails; free with
 * `sagnac_config_free`.
 */
struct SagnacConfig *sagnac_config_default(void);

/**
 * Parse a config from a JSON document; missing keys take defaults.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SagnacStatus sagnac_config_from_json(const char *json, struct SagnacConfig **out);

/**
 * Destroy a config handle. Passing NULL is a no-op.
 *
 * # Safety
 * `config` must be a pointer previously returned by this library and not
 * yet freed.
 */
void sagnac_config_free(struct SagnacConfig *config);

/**
 * Closed-form post-selected coincidence rate `(I0^2/4) sin^2(theta - xi)`.
 *
 * # Safety
 * `config` and `out_rate` must be valid pointers.
 */
enum SagnacStatus sagnac_rate_analytic(const struct SagnacConfig *config,
                                       double xi_rad,
                                       double theta_rad,
                                       double *out_rate);

/**
 * Monte Carlo coincidence rate with standard error; deterministic for a
 * fixed seed.
 *
 * # Safety
 * `config`, `out_rate` and `out_stderr` must be valid pointers.
 */
enum SagnacStatus sagnac_rate_mc(const struct SagnacConfig *config,
                                 double xi_rad,
                                 double theta_rad,
                                 enum SagnacMode mode,
                                 uint64_t trials,
                                 uint64_t seed,
                                 double *out_rate,
                                 double *out_stderr);

/**
 * Monte Carlo singles intensity at one detector.
 *
 * # Safety
 * `config`, `out_mean` and `out_stderr` must be valid pointers.
 */
enum SagnacStatus sagnac_singles_mc(const struct SagnacConfig *config,
                                    enum SagnacDetector detector,
                                    double angle_rad,
                                    uint64_t trials,
                                    uint64_t seed,
                                    double *out_mean,
                                    double *out_stderr);

/**
 * CHSH S from analytic post-selected rates at the given angles (radians).
 *
 * # Safety
 * `config` and `out_s` must be valid pointers.
 */
enum SagnacStatus sagnac_chsh_analytic(const struct SagnacConfig *config,
                                       double a_rad,
                                       double a_prime_rad,
                                       double b_rad,
                                       double b_prime_rad,
                                       double *out_s);

/**
 * CHSH S from Monte Carlo rates.
 *
 * # Safety
 * `config`, `out_s` and `out_stderr` must be valid pointers.
 */
enum SagnacStatus sagnac_chsh_mc(const struct SagnacConfig *config,
                                 double a_rad,
                                 double a_prime_rad,
                                 double b_rad,
                                 double b_prime_rad,
                                 enum SagnacMode mode,
                                 uint64_t trials,
                                 uint64_t seed,
                                 double *out_s,
                                 double *out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAGNAC_FFI_H */
