#ifndef CANTOR_ONEWAY_H
#define CANTOR_ONEWAY_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum CoStatus {
  CO_STATUS_OK = 0,
  CO_STATUS_NULL_POINTER = 1,
  CO_STATUS_INVALID_UTF8 = 2,
  CO_STATUS_PARSE = 3,
  CO_STATUS_IO = 4,
  CO_STATUS_COMPUTATION = 5,
  CO_STATUS_PANIC = 6,
} CoStatus;

/**
 * Opaque handle to a built construction.
 */
typedef struct CoConstruction CoConstruction;

/**
 * Membership verdict for one element.
 */
typedef struct CoVerdict {
  uint64_t element;
  bool member;
  uint64_t used;
  uint64_t stage_bound;
} CoVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *co_last_error(void);

/**
 * Builds a construction from a descriptor such as `simple:collatz(96,10000)`.
 *
 * # Safety
 * `spec` is a NUL-terminated string; `out` points to writable storage.
 */
enum CoStatus co_construction_new(const char *spec, struct CoConstruction **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` is null or came from [`co_construction_new`] and was not freed.
 */
void co_construction_free(struct CoConstruction *h);

/**
 * Evaluates `bits` output bits on the source `input` (e.g. `zeros`,
 * `periodic:10`). Writes the bits as a `0`/`1` string and the oracle-use.
 *
 * # Safety
 * `h` is a live handle, `input` a NUL-terminated string, `out_bits` and
 * `out_used` writable.
 */
enum CoStatus co_eval(const struct CoConstruction *h,
                      const char *input,
                      size_t bits,
                      uint64_t budget,
                      char **out_bits,
                      uint64_t *out_used);

/**
 * Decides whether `n` is in the enumerated set using the inverter `inverter`
 * (`reference`, `flip:K` or `zeros`). The extraction follows the family:
 * simple, randomized on the whole space, or two-to-one unrelativized.
 *
 * # Safety
 * `h` is a live handle, `inverter` a NUL-terminated string, `out` writable.
 */
enum CoStatus co_extract(const struct CoConstruction *h,
                         const char *inverter,
                         uint64_t n,
                         struct CoVerdict *out);

/**
 * Exact measure of a prefix-free set given one word per line, restricted to
 * the cylinder `sigma` when it is non-null. Writes a reduced fraction `p/q`.
 *
 * # Safety
 * `words` is NUL-terminated, `sigma` null or NUL-terminated, `out` writable.
 */
enum CoStatus co_measure(const char *words, const char *sigma, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not freed.
 */
void co_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANTOR_ONEWAY_H */
