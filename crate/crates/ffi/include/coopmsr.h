#ifndef COOPMSR_H
#define COOPMSR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmsrStatus {
  CMSR_STATUS_OK = 0,
  CMSR_STATUS_INVALID_ARGUMENT = 1,
  CMSR_STATUS_NULL_POINTER = 2,
  CMSR_STATUS_NOT_PRIME = 3,
  CMSR_STATUS_FIELD_TOO_SMALL = 4,
  CMSR_STATUS_GUARD_EXCEEDED = 5,
  CMSR_STATUS_BEYOND_MDS_RADIUS = 6,
  CMSR_STATUS_INTERNAL = 7,
  CMSR_STATUS_PANIC = 8,
} CmsrStatus;

/**
 * Opaque code parameters.
 */
typedef struct CmsrParams CmsrParams;

/**
 * Opaque repair transcript.
 */
typedef struct CmsrTranscript CmsrTranscript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *cmsr_last_error(void);

/**
 * Code with default points over GF(`prime`). Free with [`cmsr_params_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum CmsrStatus cmsr_params_new(size_t n, size_t k, uint64_t prime, struct CmsrParams **out);

/**
 * # Safety
 * `params` must come from [`cmsr_params_new`] and not be used afterwards. NULL is ignored.
 */
void cmsr_params_free(struct CmsrParams *params);

/**
 * Writes `r`, `m` and `ell`; any output pointer may be NULL.
 *
 * # Safety
 * `params` must be a live handle; non-null outputs must be writable.
 */
enum CmsrStatus cmsr_params_info(const struct CmsrParams *params,
                                 size_t *r,
                                 size_t *m,
                                 uint64_t *ell);

/**
 * Lower bounds on repair bandwidth and access for two failures.
 *
 * # Safety
 * `params` must be a live handle; outputs must be writable.
 */
enum CmsrStatus cmsr_repair_bounds(const struct CmsrParams *params,
                                   uint64_t *gamma,
                                   uint64_t *gamma_a);

/**
 * Systematic encoding: `data` holds `k * ell` symbols, `out` receives `n * ell`.
 *
 * # Safety
 * Buffers must be valid for the given lengths.
 */
enum CmsrStatus cmsr_encode(const struct CmsrParams *params,
                            const uint32_t *data,
                            size_t data_len,
                            uint32_t *out,
                            size_t out_len);

/**
 * Fills the erased nodes (1-based, at most `r`) of `codeword` in place.
 *
 * # Safety
 * Buffers must be valid for the given lengths.
 */
enum CmsrStatus cmsr_decode(const struct CmsrParams *params,
                            uint32_t *codeword,
                            size_t len,
                            const size_t *erased,
                            size_t erased_len);

/**
 * Cooperatively repairs nodes `i1 < i2` of `codeword`, reading only what the
 * protocol allows. Each of `first` and `second` receives `ell` symbols.
 * The transcript handle is freed with [`cmsr_transcript_free`]; pass NULL to skip it.
 *
 * # Safety
 * Buffers must be valid for the given lengths; `transcript` may be NULL.
 */
enum CmsrStatus cmsr_repair(const struct CmsrParams *params,
                            const uint32_t *codeword,
                            size_t len,
                            size_t i1,
                            size_t i2,
                            uint32_t *first,
                            uint32_t *second,
                            struct CmsrTranscript **transcript);

/**
 * Symbols moved and symbols read by helpers; `optimal` is 1 when both meet their bounds.
 *
 * # Safety
 * `t` must be a live handle; non-null outputs must be writable.
 */
enum CmsrStatus cmsr_transcript_counts(const struct CmsrTranscript *t,
                                       uint64_t *gamma,
                                       uint64_t *gamma_a,
                                       int32_t *optimal);

/**
 * Transcript as a JSON string, released with [`cmsr_string_free`].
 *
 * # Safety
 * `t` must be a live handle and `out` writable.
 */
enum CmsrStatus cmsr_transcript_to_json(const struct CmsrTranscript *t, char **out);

/**
 * # Safety
 * `t` must come from [`cmsr_repair`] and not be used afterwards. NULL is ignored.
 */
void cmsr_transcript_free(struct CmsrTranscript *t);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void cmsr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOPMSR_H */
