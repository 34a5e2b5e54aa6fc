#ifndef NKVERIFY_H
#define NKVERIFY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NkStatus {
  NK_STATUS_OK = 0,
  NK_STATUS_NULL_POINTER = 1,
  NK_STATUS_INVALID_UTF8 = 2,
  NK_STATUS_INVALID_ARGUMENT = 3,
  NK_STATUS_PARSE = 4,
  NK_STATUS_UNKNOWN_EXAMPLE = 5,
  NK_STATUS_DOMAIN = 6,
  NK_STATUS_NUMERIC = 7,
  NK_STATUS_IO = 8,
  /**
   * A panic was caught at the boundary.
   */
  NK_STATUS_INTERNAL = 9,
} NkStatus;

typedef enum NkProofMode {
  NK_PROOF_MODE_EXACT = 0,
  NK_PROOF_MODE_NUMERIC = 1,
  NK_PROOF_MODE_ALL = 2,
} NkProofMode;

/**
 * Opaque parametrized immersion.
 */
typedef struct NkImmersion NkImmersion;

/**
 * Opaque verification report.
 */
typedef struct NkReport NkReport;

typedef struct NkOptions {
  uint64_t seed;
  /**
   * Tolerance override, used only when `use_tol` is nonzero.
   */
  double tol;
  int32_t use_tol;
  int32_t timings;
} NkOptions;

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *nk_last_error_message(void);

/**
 * Static version string.
 */
const char *nk_version(void);

/**
 * Fills `out` with the command-line defaults.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `NkOptions`.
 */
enum NkStatus nk_options_default(struct NkOptions *out);

/**
 * # Safety
 * `opts` may be null (defaults); `out` must be a valid pointer.
 */
enum NkStatus nk_run_structure(const struct NkOptions *opts,
                               size_t samples,
                               size_t g_samples,
                               struct NkReport **out);

/**
 * # Safety
 * `name` must be a nul-terminated string; `out` a valid pointer.
 */
enum NkStatus nk_immersion_from_example(const char *name, struct NkImmersion **out);

/**
 * Builds an immersion from manifest JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` a valid pointer.
 */
enum NkStatus nk_immersion_from_manifest(const char *json, struct NkImmersion **out);

/**
 * Image of parameter `u` as two unit quaternions `(p, q)`, written to `out[0..8]`.
 *
 * # Safety
 * `imm` must come from this library; `u` must hold 3 doubles and `out` 8.
 */
enum NkStatus nk_immersion_point(const struct NkImmersion *imm, const double *u, double *out);

/**
 * # Safety
 * `imm` must be null or a handle from this library, not yet freed.
 */
void nk_immersion_free(struct NkImmersion *imm);

/**
 * # Safety
 * `imms` must point to `n` valid immersion handles; `out` must be valid.
 */
enum NkStatus nk_run_lagrangian(const struct NkImmersion *const *imms,
                                size_t n,
                                size_t grid,
                                const struct NkOptions *opts,
                                struct NkReport **out);

/**
 * # Safety
 * `opts` may be null; `out` must be valid.
 */
enum NkStatus nk_run_proof(size_t trials,
                           enum NkProofMode mode,
                           const struct NkOptions *opts,
                           struct NkReport **out);

/**
 * Fits a cubic tensor given as JSON text.
 *
 * # Safety
 * `tensor_json` must be a nul-terminated string; `out` must be valid.
 */
enum NkStatus nk_run_fit(const char *tensor_json,
                         const struct NkOptions *opts,
                         struct NkReport **out);

/**
 * Components (111, 112, 113, 122, 123, 133, 222, 223, 233, 333) of the cubic form built from `V`.
 *
 * # Safety
 * `v` must hold 3 doubles and `out` 10.
 */
enum NkStatus nk_cubic_from_v(const double *v, double *out);

/**
 * 1 if no check failed, 0 otherwise (also 0 for a null handle).
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
int32_t nk_report_passed(const struct NkReport *r);

/**
 * Serializes a report as JSON; free the string with [`nk_string_free`].
 *
 * # Safety
 * `r` must be a live report handle and `out` a valid pointer.
 */
enum NkStatus nk_report_to_json(const struct NkReport *r, char **out);

/**
 * # Safety
 * `r` must be null or a report handle from this library, not yet freed.
 */
void nk_report_free(struct NkReport *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void nk_string_free(char *s);

#endif  /* NKVERIFY_H */
