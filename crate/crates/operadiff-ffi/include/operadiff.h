/* C interface to the operadiff engine. */

#ifndef OPERADIFF_H
#define OPERADIFF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum OperadiffStatus {
  /**
   * Success.
   */
  OperadiffStatus_Ok = 0,
  /**
   * A verified mathematical violation (a failed check or axiom gate).
   */
  OperadiffStatus_MathViolation = 1,
  /**
   * Malformed input: unknown operad name, parse error, bad spec file.
   */
  OperadiffStatus_UsageError = 2,
  /**
   * A required pointer argument was null.
   */
  OperadiffStatus_NullPointer = 3,
  /**
   * An internal invariant failed (a panic was caught at the boundary).
   */
  OperadiffStatus_Internal = 4,
} OperadiffStatus;

/**
 * Opaque handle to an algebra over an operad.
 */
typedef struct OperadiffAlgebra OperadiffAlgebra;

/**
 * Opaque handle to an operad.
 */
typedef struct OperadiffOperad OperadiffOperad;

/**
 * Opaque handle to a verification report.
 */
typedef struct OperadiffReport OperadiffReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the most recent non-OK status on this thread.  The
 * pointer is valid until the next failing call on the same thread; never
 * free it.
 */
const char *operadiff_last_error(void);

/**
 * Creates a built-in operad over ℚ: `"com"`, `"ass"`, `"lie"`, or
 * `"pointed"` (the pointed operad of the dual numbers).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string; `out` must be non-null.
 */
enum OperadiffStatus operadiff_operad_new(const char *name, struct OperadiffOperad **out);

/**
 * Releases an operad handle.  Passing null is a no-op.
 *
 * # Safety
 * `op` must have come from `operadiff_operad_new` and not been freed.
 */
void operadiff_operad_free(struct OperadiffOperad *op);

/**
 * Loads an algebra (or rejects an operad spec) from a TOML spec file.
 * With `verify` nonzero the construction-time axiom gate runs and a
 * violated axiom yields `MathViolation`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be non-null.
 */
enum OperadiffStatus operadiff_algebra_load(const char *path,
                                            int32_t verify,
                                            struct OperadiffAlgebra **out);

/**
 * Releases an algebra handle.  Passing null is a no-op.
 *
 * # Safety
 * `a` must have come from `operadiff_algebra_load` and not been freed.
 */
void operadiff_algebra_free(struct OperadiffAlgebra *a);

/**
 * Applies the differential combinator to `expr` over the comma-separated
 * variables `vars` and writes the rendered result (e.g. `"2*x*dx"`).
 *
 * # Safety
 * `op` must be a live operad handle; `vars`, `expr` valid strings; `out`
 * non-null.  The result must be freed with `operadiff_string_free`.
 */
enum OperadiffStatus operadiff_differentiate(const struct OperadiffOperad *op,
                                             const char *vars,
                                             const char *expr,
                                             char **out);

/**
 * Frees a string returned through a `char **` out-parameter.
 *
 * # Safety
 * `s` must have come from this library and not been freed.
 */
void operadiff_string_free(char *s);

/**
 * Runs the differential-combinator axiom suite over the given variables.
 *
 * # Safety
 * `op` must be a live operad handle; `vars` a valid string; `out` non-null.
 */
enum OperadiffStatus operadiff_check_dc(const struct OperadiffOperad *op,
                                        const char *vars,
                                        uintptr_t arity_bound,
                                        uintptr_t trials,
                                        uint64_t seed,
                                        struct OperadiffReport **out);

/**
 * Runs the algebra axiom suite up to the given arity bound.
 *
 * # Safety
 * `a` must be a live algebra handle; `out` non-null.
 */
enum OperadiffStatus operadiff_check_algebra(const struct OperadiffAlgebra *a,
                                             uintptr_t bound,
                                             struct OperadiffReport **out);

/**
 * Runs the adjoint tangent-structure suite at the given weight bound.
 *
 * # Safety
 * `a` must be a live algebra handle; `out` non-null.
 */
enum OperadiffStatus operadiff_check_adjoint_tangent(const struct OperadiffAlgebra *a,
                                                     uintptr_t weight_bound,
                                                     uint64_t seed,
                                                     struct OperadiffReport **out);

/**
 * Writes the dimension of the derivation Lie algebra of `a`.
 *
 * # Safety
 * `a` must be a live algebra handle; `out` non-null.
 */
enum OperadiffStatus operadiff_derivation_count(const struct OperadiffAlgebra *a, uintptr_t *out);

/**
 * Returns 1 when every check in the report passed, 0 otherwise (including
 * for a null handle).
 *
 * # Safety
 * `r` must be a live report handle or null.
 */
int32_t operadiff_report_passed(const struct OperadiffReport *r);

/**
 * Renders a report as text (`as_json` = 0) or JSON (`as_json` != 0).
 *
 * # Safety
 * `r` must be a live report handle; `out` non-null.  The result must be
 * freed with `operadiff_string_free`.
 */
enum OperadiffStatus operadiff_report_render(const struct OperadiffReport *r,
                                             int32_t as_json,
                                             char **out);

/**
 * Releases a report handle.  Passing null is a no-op.
 *
 * # Safety
 * `r` must have come from this library and not been freed.
 */
void operadiff_report_free(struct OperadiffReport *r);

/**
 * The crate version as a static string; never free it.
 */
const char *operadiff_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPERADIFF_H */
