#ifndef HTHS_H
#define HTHS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HTHS_FAMILY_HS 0

#define HTHS_FAMILY_HS_PLUS 1

#define HTHS_FAMILY_HTHS 2

#define HTHS_FAMILY_HTHS_PLUS 3

#define HTHS_FAMILY_HTHS_LAMBDA 4

/**
 * Outcome of a call.
 */
typedef enum HthsStatus {
  HTHS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HTHS_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or malformed.
   */
  HTHS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The operation is not available for the requested family.
   */
  HTHS_STATUS_UNSUPPORTED = 3,
  /**
   * A numeric failure such as a diverged chain or an underflow.
   */
  HTHS_STATUS_NUMERIC_FAILURE = 4,
  /**
   * Reading or writing a file failed.
   */
  HTHS_STATUS_IO = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  HTHS_STATUS_INTERNAL = 6,
} HthsStatus;

/**
 * Result of a posterior run. Opaque to C callers.
 */
typedef struct HthsChain HthsChain;

/**
 * Settings for `hths_chain_run`. Start from `hths_chain_options_default`.
 */
typedef struct HthsChainOptions {
  size_t burn_in;
  size_t retained;
  size_t thinning;
  uint64_t seed;
  double slice_width;
  /**
   * Keep `ln γ`, `p` and `λ` draws as well as `φ` and the globals.
   */
  bool keep_locals;
  bool pin_mu;
  double mu;
  bool pin_sigma2;
  double sigma2;
  bool pin_z;
  double z;
} HthsChainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if the last
 * call succeeded. The pointer stays valid until the next call.
 */
const char *hths_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hths_version(void);

/**
 * Prior density of the local scale `γ`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_density_gamma(uint32_t family_code, double gamma, double *out);

/**
 * Prior density of the shrinkage profile `τ = γ / (1 + γ)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_density_tau(uint32_t family_code, double tau, double *out);

/**
 * Marginal prior density of an effect `φ` with unit noise and `Z = 1`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_phi_marginal(uint32_t family_code, double phi, double *out);

/**
 * Log marginal likelihood `ln m(y)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_log_marginal_likelihood(uint32_t family_code, double y, double *out);

/**
 * Score `d/dy ln m(y)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_predictive_score(uint32_t family_code, double y, double *out);

/**
 * Kullback-Leibler risk bound at `phi0` after `n` observations.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_kl_risk_bound(uint32_t family_code, double phi0, uint64_t n, double *out);

/**
 * Fill `out` with the library's default chain settings.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HthsStatus hths_chain_options_default(struct HthsChainOptions *out);

/**
 * Run the Gibbs sampler on `n` observations with the default global
 * priors. On success `*out` owns a new handle.
 *
 * # Safety
 * `data` must point to `n` readable doubles; `options` must be null or
 * point to a valid struct (null means defaults); `out` must be valid for
 * one write.
 */
enum HthsStatus hths_chain_run(const double *data,
                               size_t n,
                               uint32_t family_code,
                               const struct HthsChainOptions *options,
                               struct HthsChain **out);

/**
 * Release a handle from `hths_chain_run`. Null is ignored.
 *
 * # Safety
 * `chain` must be null or a handle not yet freed.
 */
void hths_chain_free(struct HthsChain *chain);

/**
 * Number of retained draws per parameter.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be valid for one write.
 */
enum HthsStatus hths_chain_draws(const struct HthsChain *chain, size_t *out);

/**
 * Number of stored parameters.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be valid for one write.
 */
enum HthsStatus hths_chain_parameter_count(const struct HthsChain *chain, size_t *out);

/**
 * Name of parameter `index` such as `"phi[3]"`; the string is owned by
 * the handle.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be valid for one write.
 */
enum HthsStatus hths_chain_parameter_name(const struct HthsChain *chain,
                                          size_t index,
                                          const char **out);

/**
 * Copy the draws of the named parameter into `buffer`, which must hold at
 * least `hths_chain_draws` values.
 *
 * # Safety
 * `chain` must be a live handle, `name` a NUL-terminated string and
 * `buffer` valid for `capacity` writes.
 */
enum HthsStatus hths_chain_column(const struct HthsChain *chain,
                                  const char *name,
                                  double *buffer,
                                  size_t capacity);

/**
 * Posterior median of `φ_index`.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be valid for one write.
 */
enum HthsStatus hths_chain_phi_median(const struct HthsChain *chain, size_t index, double *out);

/**
 * Write the draws to `path` in the library's binary draw-store format.
 *
 * # Safety
 * `chain` must be a live handle and `path` a NUL-terminated string.
 */
enum HthsStatus hths_chain_write(const struct HthsChain *chain, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HTHS_H */
