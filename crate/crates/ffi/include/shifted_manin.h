#ifndef SHIFTED_MANIN_H
#define SHIFTED_MANIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. The first four match the command-line exit codes.
 */
typedef enum SmStatus {
  SM_OK = 0,
  SM_FAILED = 1,
  SM_INVALID_INPUT = 2,
  SM_OVERFLOW = 3,
  SM_NULL_POINTER = 4,
  SM_INVALID_UTF8 = 5,
  SM_PANIC = 6,
} SmStatus;

typedef enum SmSuite {
  SM_SUITE_LIE = 0,
  SM_SUITE_METRIC = 1,
  SM_SUITE_BIALGEBRA = 2,
  SM_SUITE_TRIPLE = 3,
} SmSuite;

/**
 * A parsed algebra document.
 */
typedef struct SmAlgebra SmAlgebra;

/**
 * The outcome of a suite.
 */
typedef struct SmReport SmReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *sm_version(void);

/**
 * Message for the last non-`SM_OK` status on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *sm_last_error(void);

/**
 * Parses an algebra document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 * On success `*out` owns a handle to release with `sm_algebra_free`.
 */
enum SmStatus sm_algebra_from_json(const char *json, struct SmAlgebra **out);

/**
 * # Safety
 * `a` must be NULL or a handle from this library that has not been freed.
 */
void sm_algebra_free(struct SmAlgebra *a);

/**
 * Number of basis vectors.
 *
 * # Safety
 * `a` must be a live algebra handle and `dim` writable.
 */
enum SmStatus sm_algebra_dim(const struct SmAlgebra *a, size_t *dim);

/**
 * Runs one structural suite. `SM_OK` means every check passed; on
 * `SM_OK` or `SM_FAILED` a report is stored in `*report`.
 *
 * # Safety
 * `a` must be a live algebra handle and `report` writable.
 */
enum SmStatus sm_check(const struct SmAlgebra *a, enum SmSuite suite, struct SmReport **report);

/**
 * Builds the double of a bialgebra document as a new algebra document.
 * `*double_json` is NULL when the input fails its checks.
 *
 * # Safety
 * `a` must be a live handle; `double_json` and `report` writable. The string
 * is released with `sm_string_free`, the report with `sm_report_free`.
 */
enum SmStatus sm_double(const struct SmAlgebra *a, char **double_json, struct SmReport **report);

/**
 * r-matrix and enveloping-algebra suites of a triple.
 *
 * # Safety
 * `a` must be a live handle and `report` writable.
 */
enum SmStatus sm_quantize(const struct SmAlgebra *a,
                          size_t hbar_order,
                          size_t word_len,
                          struct SmReport **report);

/**
 * The twisted Koszul complex of a triple.
 *
 * # Safety
 * `a` must be a live handle and `report` writable.
 */
enum SmStatus sm_koszul(const struct SmAlgebra *a,
                        size_t max_weight,
                        size_t word_len,
                        size_t hbar_order,
                        struct SmReport **report);

/**
 * Loop suite for a base algebra with β. `rmatrix_json` may be NULL for
 * Yang's r-matrix; `level` is a rational such as "1" or "-2/3".
 *
 * # Safety
 * `g` must be a live handle; `modules_json` must point to `n_modules`
 * NUL-terminated strings (or be NULL when `n_modules` is 0); `level` must be
 * a NUL-terminated string; `report` must be writable.
 */
enum SmStatus sm_yangian(const struct SmAlgebra *g,
                         const char *rmatrix_json,
                         const char *const *modules_json,
                         size_t n_modules,
                         size_t truncation,
                         const char *level,
                         size_t hbar_order,
                         size_t word_len,
                         struct SmReport **report);

/**
 * Whether every check in the report passed.
 *
 * # Safety
 * `r` must be a live report handle.
 */
bool sm_report_passed(const struct SmReport *r);

/**
 * Number of checks in the report.
 *
 * # Safety
 * `r` must be a live report handle.
 */
size_t sm_report_len(const struct SmReport *r);

/**
 * The report as JSON (compact unless `pretty`); NULL when `r` is NULL.
 *
 * # Safety
 * `r` must be NULL or a live report handle. Release the string with
 * `sm_string_free`.
 */
char *sm_report_json(const struct SmReport *r, bool pretty);

/**
 * The report as indented text; NULL when `r` is NULL.
 *
 * # Safety
 * As for `sm_report_json`.
 */
char *sm_report_text(const struct SmReport *r);

/**
 * # Safety
 * `r` must be NULL or a report handle that has not been freed.
 */
void sm_report_free(struct SmReport *r);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library that has not been freed.
 */
void sm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIFTED_MANIN_H */
