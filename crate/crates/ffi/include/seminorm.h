#ifndef SEMINORM_H
#define SEMINORM_H

#include <stdbool.h>
#include <stddef.h>

/*
 Result code of every fallible call.
 */
typedef enum SnStatus {
  SN_STATUS_OK = 0,
  SN_STATUS_NULL_POINTER = 1,
  SN_STATUS_INVALID_ARGUMENT = 2,
  SN_STATUS_NOT_SQUARE = 3,
  SN_STATUS_DIMENSION_MISMATCH = 4,
  SN_STATUS_NON_FINITE = 5,
  SN_STATUS_NOT_HERMITIAN = 6,
  SN_STATUS_NOT_PSD = 7,
  SN_STATUS_ZERO_OPERATOR = 8,
  SN_STATUS_CONVERGENCE_FAILURE = 9,
  SN_STATUS_NOT_IN_BA = 10,
  SN_STATUS_CONDITION_NOT_MET = 11,
  SN_STATUS_UNKNOWN_THEOREM = 12,
  SN_STATUS_PANIC = 13,
} SnStatus;

/*
 Opaque semi-Hilbertian context built from a PSD matrix `A`.
 */
typedef struct SnContext SnContext;

/*
 Opaque dense complex matrix.
 */
typedef struct SnMatrix SnMatrix;

/*
 The four A-quantities of an operator.
 */
typedef struct SnQuantities {
  double seminorm;
  double w;
  double c;
  double m;
} SnQuantities;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.

 # Safety
 `data` must point to `2·rows·cols` readable doubles and `out` must be a
 valid pointer to a handle slot.
 */
enum SnStatus sn_matrix_new(size_t rows, size_t cols, const double *data, struct SnMatrix **out);

/*
 Releases a matrix. Null is ignored.

 # Safety
 `m` must be null or a handle from this library that was not yet freed.
 */
void sn_matrix_free(struct SnMatrix *m);

/*
 Row count, or 0 for null.

 # Safety
 `m` must be null or a live handle.
 */
size_t sn_matrix_rows(const struct SnMatrix *m);

/*
 Column count, or 0 for null.

 # Safety
 `m` must be null or a live handle.
 */
size_t sn_matrix_cols(const struct SnMatrix *m);

/*
 Copies the entries as interleaved doubles into `out`, which holds `len`
 doubles; `len` must be at least `2·rows·cols`.

 # Safety
 `m` must be a live handle and `out` must point to `len` writable doubles.
 */
enum SnStatus sn_matrix_copy_data(const struct SnMatrix *m, double *out, size_t len);

/*
 Builds a context from the PSD matrix `a`. A positive finite `rank_tol`
 replaces the default eigenvalue cutoff; any other value keeps it.

 # Safety
 `a` must be a live handle and `out` a valid pointer to a handle slot.
 */
enum SnStatus sn_context_new(const struct SnMatrix *a, double rank_tol, struct SnContext **out);

/*
 Releases a context. Null is ignored.

 # Safety
 `ctx` must be null or a handle from this library that was not yet freed.
 */
void sn_context_free(struct SnContext *ctx);

/*
 Numerical rank of `A`, or 0 for null.

 # Safety
 `ctx` must be null or a live handle.
 */
size_t sn_context_rank(const struct SnContext *ctx);

/*
 Order of `A`, or 0 for null.

 # Safety
 `ctx` must be null or a live handle.
 */
size_t sn_context_dim(const struct SnContext *ctx);

/*
 Membership of `t` in `B_A` and its residual.

 # Safety
 Handles must be live; `member` and `residual` must be writable.
 */
enum SnStatus sn_in_ba(const struct SnContext *ctx,
                       const struct SnMatrix *t,
                       bool *member,
                       double *residual);

/*
 `T♯ = A†T*A`. Fails with [`SnStatus::NotInBa`] outside `B_A`.

 # Safety
 Handles must be live and `out` a valid pointer to a handle slot.
 */
enum SnStatus sn_sharp(const struct SnContext *ctx,
                       const struct SnMatrix *t,
                       struct SnMatrix **out);

/*
 The r×r reduced operator `T̃`.

 # Safety
 Handles must be live and `out` a valid pointer to a handle slot.
 */
enum SnStatus sn_tilde(const struct SnContext *ctx,
                       const struct SnMatrix *t,
                       struct SnMatrix **out);

/*
 `‖T‖_A`, `w_A(T)`, `c_A(T)` and `m_A(T)` with the default sweep.

 # Safety
 Handles must be live and `out` writable.
 */
enum SnStatus sn_a_quantities(const struct SnContext *ctx,
                              const struct SnMatrix *t,
                              struct SnQuantities *out);

/*
 Classical numerical radius of a square matrix.

 # Safety
 `b` must be a live handle and `out` writable.
 */
enum SnStatus sn_numerical_radius(const struct SnMatrix *b, double *out);

/*
 Classical Crawford number of a square matrix.

 # Safety
 `b` must be a live handle and `out` writable.
 */
enum SnStatus sn_crawford_number(const struct SnMatrix *b, double *out);

/*
 Evaluates one chain and returns its report as a JSON string that must be
 released with [`sn_string_free`]. `s` and `x` may be null when the chain
 does not use them. A `tol` that is not finite and non-negative selects the
 default.

 # Safety
 `theorem_id` must be a NUL-terminated string, non-null handles must be
 live, and `out_json` must be writable.
 */
enum SnStatus sn_check_json(const struct SnContext *ctx,
                            const char *theorem_id,
                            const struct SnMatrix *t,
                            const struct SnMatrix *s,
                            const struct SnMatrix *x,
                            double tol,
                            char **out_json);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library that was not yet freed.
 */
void sn_string_free(char *s);

/*
 Message of the last failed call on this thread; empty after a success.
 Valid until the next call on the same thread.
 */
const char *sn_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMINORM_H */
