#ifndef QSERIES_H
#define QSERIES_H

#include <stdbool.h>
#include <stdint.h>

/**
 * Result codes. `QS_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  QS_STATUS_INVALID_UTF8 = 2,
  QS_STATUS_PARSE = 3,
  QS_STATUS_INVALID_ARGUMENT = 4,
  QS_STATUS_UNKNOWN_IDENTITY = 5,
  QS_STATUS_NON_INVERTIBLE = 6,
  QS_STATUS_BEYOND_TRUNCATION = 7,
  QS_STATUS_MATH = 8,
  QS_STATUS_PANIC = 9,
} QsStatus;

/**
 * Opaque truncated series.
 */
typedef struct QsSeries QsSeries;

/**
 * Output of `qs_modcheck`; valuations are `num/den`.
 */
typedef struct QsModcheck {
  int64_t valinf_num;
  int64_t valinf_den;
  int64_t val0_num;
  int64_t val0_den;
  bool modular;
} QsModcheck;

/**
 * Output of `qs_find_scaling`.
 */
typedef struct QsScaling {
  int64_t k;
  int64_t n0;
  int64_t level;
} QsScaling;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or "" after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *qs_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void qs_string_free(char *s);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void qs_series_free(struct QsSeries *s);

/**
 * Evaluate an expression to order `order_num/order_den`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_eval(const char *expr,
                      int64_t order_num,
                      int64_t order_den,
                      struct QsSeries **out);

/**
 * Parse series text such as `1 - q + 2q^{3/2} + O(q^4)`.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_series_parse(const char *src, struct QsSeries **out);

/**
 * Text form including the `O(q^N)` term. Free with `qs_string_free`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_series_to_string(const struct QsSeries *s, char **out);

/**
 * Truncation order as `num/den`.
 *
 * # Safety
 * `s` must be a live handle; the outputs must be writable.
 */
enum QsStatus qs_series_order(const struct QsSeries *s, int64_t *num, int64_t *den);

/**
 * Coefficient of `q^(exp_num/exp_den)` as a decimal rational string.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_series_coeff(const struct QsSeries *s,
                              int64_t exp_num,
                              int64_t exp_den,
                              char **out);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum QsStatus qs_series_add(const struct QsSeries *a,
                            const struct QsSeries *b,
                            struct QsSeries **out);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum QsStatus qs_series_mul(const struct QsSeries *a,
                            const struct QsSeries *b,
                            struct QsSeries **out);

/**
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_series_inv(const struct QsSeries *a, struct QsSeries **out);

/**
 * Check a built-in identity to integer order `order`. `equal` receives the
 * verdict; a mismatch is not an error and its description is left in
 * `qs_last_error`.
 *
 * # Safety
 * `id` must be a NUL-terminated string; `equal` must be writable.
 */
enum QsStatus qs_verify(const char *id, int64_t order, bool *equal);

/**
 * Robins' criterion for a bracket list `[[N,g,r],...]`. `level <= 0` infers
 * the level as the lcm of the `N`.
 *
 * # Safety
 * `list` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_modcheck(const char *list, int64_t level, struct QsModcheck *out);

/**
 * Least scaling `tau -> k tau` making the list modular.
 *
 * # Safety
 * `list` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_find_scaling(const char *list, int64_t level, struct QsScaling *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSERIES_H */
