#ifndef GRANDSMALL_H
#define GRANDSMALL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_GROUP = 2,
  GS_STATUS_DIMENSION = 3,
  GS_STATUS_SPEC_MISMATCH = 4,
  GS_STATUS_NON_FINITE = 5,
  GS_STATUS_INVALID_PARAMETER = 6,
  GS_STATUS_INADMISSIBLE = 7,
  GS_STATUS_PARSE = 8,
  GS_STATUS_PANIC = 9,
} GsStatus;

// A complex function on a group (or on its dual, which shares the indexing).
typedef struct GsFunction GsFunction;

// A finite abelian group `Z_{n1} x ... x Z_{nk}`.
typedef struct GsGroup GsGroup;

// A bilinear multiplier symbol on `Ĝ x Ĝ`.
typedef struct GsSymbol GsSymbol;

// Geometric ε-grid: `count` points from `min_fraction*(p-1)` to `p-1`.
typedef struct GsGrid {
  size_t count;
  double min_fraction;
} GsGrid;

// Small-norm bracket. `converged` is false when the gap exceeds the tolerance.
typedef struct GsCertificate {
  double value;
  double lower;
  double upper;
  double gap;
  size_t iterations;
  bool converged;
} GsCertificate;

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the thread.
const char *gs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gs_version(void);

// Parses a spec such as `"Z4xZ4"`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum GsStatus gs_group_parse(const char *spec, struct GsGroup **out_group);

// Order of the group, 0 for a null handle.
//
// # Safety
// `group` must be null or a live handle.
size_t gs_group_order(const struct GsGroup *group);

// # Safety
// `group` must be null or a handle not yet freed.
void gs_group_free(struct GsGroup *group);

// Function with `len == order` values in row-major order; `im` may be null.
//
// # Safety
// `re` (and `im` when non-null) must point to `len` doubles.
enum GsStatus gs_function_new(const struct GsGroup *group,
                              const double *re,
                              const double *im,
                              size_t len,
                              struct GsFunction **out_fn);

// # Safety
// `f` must be null or a live handle.
size_t gs_function_len(const struct GsFunction *f);

// Copies values out; `len` must equal the function length. `im` may be null.
//
// # Safety
// `re` (and `im` when non-null) must have room for `len` doubles.
enum GsStatus gs_function_values(const struct GsFunction *f, double *re, double *im, size_t len);

// # Safety
// `f` must be null or a handle not yet freed.
void gs_function_free(struct GsFunction *f);

// Lebesgue norm under normalized measure; `q` may be `INFINITY`.
//
// # Safety
// `f` must be a live handle and `value` writable.
enum GsStatus gs_lp_norm(const struct GsFunction *f, double q, double *value);

// Grand norm over the geometric grid.
//
// # Safety
// `f` must be a live handle and `value` writable.
enum GsStatus gs_grand_norm(const struct GsFunction *f,
                            double p,
                            double theta,
                            struct GsGrid g,
                            double *value);

// Certified small norm with exponent `p_conj`. `max_iter == 0` and
// `tol_rel <= 0` select the defaults. A flagged certificate still returns
// `GS_STATUS_OK`; check `converged`.
//
// # Safety
// `f` must be a live handle and `cert` writable.
enum GsStatus gs_small_norm(const struct GsFunction *f,
                            double p_conj,
                            double theta,
                            struct GsGrid g,
                            size_t max_iter,
                            double tol_rel,
                            struct GsCertificate *cert);

// Constant symbol `a = re + i im`.
//
// # Safety
// `group` must be a live handle; `out_sym` writable.
enum GsStatus gs_symbol_constant(const struct GsGroup *group,
                                 double re,
                                 double im,
                                 struct GsSymbol **out_sym);

// Difference symbol `M(s - t)` from `len == order` values of `M` on `Ĝ`.
//
// # Safety
// As for [`gs_function_new`].
enum GsStatus gs_symbol_difference(const struct GsGroup *group,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct GsSymbol **out_sym);

// Dense symbol from `len == order^2` values, index `s * order + t`.
//
// # Safety
// As for [`gs_function_new`].
enum GsStatus gs_symbol_general(const struct GsGroup *group,
                                const double *re,
                                const double *im,
                                size_t len,
                                struct GsSymbol **out_sym);

// Symbol from its JSON document (`{spec, structure, values?}`).
//
// # Safety
// `json` must be a NUL-terminated string; `out_sym` writable.
enum GsStatus gs_symbol_from_json(const char *json, struct GsSymbol **out_sym);

// # Safety
// `m` must be null or a handle not yet freed.
void gs_symbol_free(struct GsSymbol *m);

// `B_m(f, g)`; `oracle` forces the literal triple sum.
//
// # Safety
// All handles live; `out_fn` writable.
enum GsStatus gs_apply(const struct GsSymbol *m,
                       const struct GsFunction *f,
                       const struct GsFunction *g,
                       bool oracle,
                       struct GsFunction **out_fn);

#endif  /* GRANDSMALL_H */
