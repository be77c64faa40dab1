#ifndef QBD_H
#define QBD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QbdStatus {
  QBD_STATUS_OK = 0,
  QBD_STATUS_NULL_POINTER = 1,
  QBD_STATUS_INVALID_UTF8 = 2,
  QBD_STATUS_PARSE = 3,
  QBD_STATUS_NOT_A_TREE = 4,
  QBD_STATUS_NOT_NONSINGULAR = 5,
  QBD_STATUS_INVALID_LABELS = 6,
  QBD_STATUS_INVALID_VERTEX = 7,
  QBD_STATUS_UNKNOWN_OBJECT = 8,
  QBD_STATUS_POLE = 9,
  QBD_STATUS_BDQ_ZERO = 10,
  QBD_STATUS_SINGULAR = 11,
  QBD_STATUS_PANIC = 12,
} QbdStatus;

/**
 * Opaque handle to a nonsingular tree with its standard labeling.
 */
typedef struct QbdTree QbdTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a tree document `{"edges": [[u, v], ...]}` with optional
 * `"labels"` and `"matching"`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` writable.
 */
enum QbdStatus qbd_tree_from_json(const char *json, struct QbdTree **out);

/**
 * Random nonsingular tree with `p` pairs, reproducible from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QbdStatus qbd_tree_random(size_t p, uint64_t seed, struct QbdTree **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `tree` must come from this library and not be freed twice.
 */
void qbd_tree_free(struct QbdTree *tree);

/**
 * Number of matching pairs.
 *
 * # Safety
 * `tree` must be a live handle and `out` writable.
 */
enum QbdStatus qbd_tree_p(const struct QbdTree *tree, size_t *out);

/**
 * The tree with its matching and labels as JSON.
 *
 * # Safety
 * `tree` must be a live handle and `out` writable.
 */
enum QbdStatus qbd_tree_to_json(const struct QbdTree *tree, char **out);

/**
 * Matrix `name` (`qB`, `E`, `qL`, `qD` or `eD`) as matrix JSON, evaluated at
 * `at` (`"a/b"`) unless `at` is null.
 *
 * # Safety
 * `tree` must be a live handle, `name` a valid string, `at` null or a valid
 * string, and `out` writable.
 */
enum QbdStatus qbd_matrix_json(const struct QbdTree *tree,
                               const char *name,
                               const char *at,
                               char **out);

/**
 * Closed-form inverse of `qB` or `E`, symbolic or evaluated at `at`.
 * Excluded points give `Pole` or `BdqZero`.
 *
 * # Safety
 * As for [`qbd_matrix_json`].
 */
enum QbdStatus qbd_inverse_json(const struct QbdTree *tree,
                                const char *name,
                                const char *at,
                                char **out);

/**
 * `bd_q` as a polynomial JSON array.
 *
 * # Safety
 * `tree` must be a live handle and `out` writable.
 */
enum QbdStatus qbd_bdq_json(const struct QbdTree *tree, char **out);

/**
 * Run the identity suite; writes the number of checks and of failures.
 *
 * # Safety
 * `tree` must be a live handle; `checks` and `failures` writable.
 */
enum QbdStatus qbd_verify(const struct QbdTree *tree, size_t *checks, size_t *failures);

/**
 * Run the identity suite and write the report JSON.
 *
 * # Safety
 * `tree` must be a live handle and `out` writable.
 */
enum QbdStatus qbd_verify_json(const struct QbdTree *tree, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qbd_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *qbd_last_error(void);

/**
 * Static description of a status code.
 */
const char *qbd_status_str(enum QbdStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBD_H */
