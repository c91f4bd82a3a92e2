/* C interface to the quadratic-module toolkit. */

#ifndef QM_FFI_H
#define QM_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum QmStatus {
  QmStatus_Ok = 0,
  /**
   * Invalid input (parse failure, bad matrix, bad module data).
   */
  QmStatus_InvalidArgument = 1,
  /**
   * A size guard rejected the operation.
   */
  QmStatus_GuardExceeded = 2,
  /**
   * The module is degenerate.
   */
  QmStatus_Degenerate = 3,
  /**
   * No realization found within the search budget.
   */
  QmStatus_NotFound = 4,
  /**
   * Internal invariant violation.
   */
  QmStatus_Internal = 5,
} QmStatus;

/**
 * Opaque handle to a validated Gram matrix.
 */
typedef struct QmGram QmGram;

/**
 * Opaque handle to a finite quadratic module.
 */
typedef struct QmModule QmModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread, or NULL when the last
 * call succeeded. The returned string must be freed with `qm_string_free`.
 */
char *qm_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 */
void qm_string_free(char *s);

/**
 * Build a Gram matrix from `rank`×`rank` entries in row-major order.
 * On success stores a new handle in `out`.
 *
 * # Safety
 * `entries` must point to `rank*rank` readable values and `out` must be a
 * valid pointer.
 */
enum QmStatus qm_gram_new(const int64_t *entries, uintptr_t rank, struct QmGram **out);

/**
 * Parse a Gram matrix from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QmStatus qm_gram_from_json(const char *json, struct QmGram **out);

/**
 * Release a Gram handle. NULL is ignored.
 *
 * # Safety
 * `gram` must be a handle from this library, not yet freed.
 */
void qm_gram_free(struct QmGram *gram);

/**
 * Signed determinant as a decimal string.
 *
 * # Safety
 * `gram` must be a live handle.
 */
char *qm_gram_determinant(const struct QmGram *gram);

/**
 * Signature of the Gram matrix: positive and negative eigenvalue counts.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QmStatus qm_gram_signature(const struct QmGram *gram, uintptr_t *pos, uintptr_t *neg);

/**
 * Discriminant module of a Gram matrix.
 *
 * # Safety
 * `gram` must be a live handle and `out` a valid pointer.
 */
enum QmStatus qm_discriminant(const struct QmGram *gram, struct QmModule **out);

/**
 * Parse a module from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QmStatus qm_module_from_json(const char *json, struct QmModule **out);

/**
 * Release a module handle. NULL is ignored.
 *
 * # Safety
 * `module` must be a handle from this library, not yet freed.
 */
void qm_module_free(struct QmModule *module);

/**
 * Group order as a decimal string.
 *
 * # Safety
 * `module` must be a live handle.
 */
char *qm_module_order(const struct QmModule *module);

/**
 * JSON form of the module.
 *
 * # Safety
 * `module` must be a live handle.
 */
char *qm_module_to_json(const struct QmModule *module);

/**
 * Decide isomorphism. `guard` bounds the group order (0 = default).
 *
 * # Safety
 * All pointers must be valid.
 */
enum QmStatus qm_module_is_isomorphic(const struct QmModule *a,
                                      const struct QmModule *b,
                                      uint64_t guard,
                                      bool *result);

/**
 * Central charge mod 8 of a nondegenerate module.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QmStatus qm_module_central_charge(const struct QmModule *module, uint64_t guard, uint8_t *out);

/**
 * Block decomposition as a JSON string stored in `out`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QmStatus qm_module_decompose_json(const struct QmModule *module, uint64_t guard, char **out);

/**
 * Realizing even lattice as Gram-matrix JSON stored in `out`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QmStatus qm_module_realize_json(const struct QmModule *module, uint64_t guard, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QM_FFI_H */
