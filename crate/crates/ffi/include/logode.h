#ifndef LOGODE_H
#define LOGODE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum LogodeStatus {
  LOGODE_STATUS_OK = 0,
  LOGODE_STATUS_NULL_POINTER = 1,
  LOGODE_STATUS_INVALID_ARGUMENT = 2,
  LOGODE_STATUS_PARSE_ERROR = 3,
  LOGODE_STATUS_DOMAIN_ERROR = 4,
  LOGODE_STATUS_CONVERGENCE_ERROR = 5,
  LOGODE_STATUS_OUTSIDE_VALIDITY = 6,
  LOGODE_STATUS_VERIFICATION_FAILED = 7,
  LOGODE_STATUS_PANIC = 8,
} LogodeStatus;

/**
 * Parsed coefficient expression.
 */
typedef struct LogodeExpr LogodeExpr;

/**
 * Closed-form solution together with the problem it solves.
 */
typedef struct LogodeSolution LogodeSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL if the last
 * call succeeded. Owned by the library; valid until the next call.
 */
const char *logode_last_error(void);

/**
 * Parse `text` into a new expression handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum LogodeStatus logode_expr_parse(const char *text, struct LogodeExpr **out);

/**
 * Evaluate an expression at `x`.
 *
 * # Safety
 * `expr` must come from `logode_expr_parse`; `out` must be writable.
 */
enum LogodeStatus logode_expr_eval(const struct LogodeExpr *expr, double x, double *out);

/**
 * Release an expression handle. NULL is ignored.
 *
 * # Safety
 * `expr` must come from `logode_expr_parse` and not be used afterwards.
 */
void logode_expr_free(struct LogodeExpr *expr);

/**
 * Solve `y' + f y = g`, `y(x0) = y0`.
 *
 * # Safety
 * `f`, `g` must be live expression handles; `out` must be writable.
 */
enum LogodeStatus logode_solve_linear(const struct LogodeExpr *f,
                                      const struct LogodeExpr *g,
                                      double x0,
                                      double y0,
                                      struct LogodeSolution **out);

/**
 * Solve `y' + f y = g y^alpha`, `y(x0) = y0`.
 *
 * # Safety
 * `f`, `g` must be live expression handles; `out` must be writable.
 */
enum LogodeStatus logode_solve_bernoulli(const struct LogodeExpr *f,
                                         const struct LogodeExpr *g,
                                         double alpha,
                                         double x0,
                                         double y0,
                                         struct LogodeSolution **out);

/**
 * Solve `y' + f e^(beta y) = g`, `y(x0) = y0`.
 *
 * # Safety
 * `f`, `g` must be live expression handles; `out` must be writable.
 */
enum LogodeStatus logode_solve_exp(const struct LogodeExpr *f,
                                   const struct LogodeExpr *g,
                                   double beta,
                                   double x0,
                                   double y0,
                                   struct LogodeSolution **out);

/**
 * Solve `y'' + b y' + c y = 0`, `y(x0) = y0`, `y'(x0) = yp0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LogodeStatus logode_solve_second_order(double b,
                                            double c,
                                            double x0,
                                            double y0,
                                            double yp0,
                                            struct LogodeSolution **out);

/**
 * Evaluate the solution at `x`.
 *
 * # Safety
 * `sol` must be a live solution handle; `out` must be writable.
 */
enum LogodeStatus logode_solution_eval(const struct LogodeSolution *sol, double x, double *out);

/**
 * Evaluate at `n` points `xs[i]` into `out[i]`. Stops at the first failure.
 *
 * # Safety
 * `xs` and `out` must point to `n` readable and writable doubles.
 */
enum LogodeStatus logode_solution_eval_many(const struct LogodeSolution *sol,
                                            const double *xs,
                                            size_t n,
                                            double *out);

/**
 * Current validity interval. Bounds may be infinite.
 *
 * # Safety
 * `sol` must be a live solution handle; `lo`, `hi` must be writable.
 */
enum LogodeStatus logode_solution_validity(const struct LogodeSolution *sol,
                                           double *lo,
                                           double *hi);

/**
 * Narrow the validity interval by scanning `[lo, hi]` for the first
 * failure on each side of the anchor; writes the result to `out_lo`,
 * `out_hi`. `samples == 0` selects the default density.
 *
 * # Safety
 * `sol` must be a live solution handle not in use by other threads.
 */
enum LogodeStatus logode_solution_scan_validity(struct LogodeSolution *sol,
                                                double lo,
                                                double hi,
                                                size_t samples,
                                                double *out_lo,
                                                double *out_hi);

/**
 * Run every applicable check on `[lo, hi]` and write a JSON report to
 * `*out_json` (release with `logode_string_free`). Returns
 * `LOGODE_STATUS_VERIFICATION_FAILED` with the report still written when a
 * check fails. `check_tol <= 0` selects the default oracle tolerance.
 *
 * # Safety
 * `sol` must be a live solution handle; `out_json` must be writable.
 */
enum LogodeStatus logode_solution_verify(const struct LogodeSolution *sol,
                                         double lo,
                                         double hi,
                                         double check_tol,
                                         char **out_json);

/**
 * Release a solution handle. NULL is ignored.
 *
 * # Safety
 * `sol` must come from a `logode_solve_*` call and not be used afterwards.
 */
void logode_solution_free(struct LogodeSolution *sol);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void logode_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGODE_H */
