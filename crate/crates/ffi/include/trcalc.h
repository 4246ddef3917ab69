#ifndef TRCALC_H
#define TRCALC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TrcalcStatus {
  TRCALC_STATUS_OK = 0,
  // The job ran but a verification check failed.
  TRCALC_STATUS_FAIL = 1,
  // Invalid arguments.
  TRCALC_STATUS_USAGE = 2,
  TRCALC_STATUS_NULL_POINTER = 3,
  TRCALC_STATUS_PANIC = 4,
} TrcalcStatus;

// Values accepted for the `target` argument of [`trcalc_chart_compute`].
enum TrcalcTarget
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : uint32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  TRCALC_TARGET_TR = 0,
  TRCALC_TARGET_FILTRATION = 1,
  TRCALC_TARGET_GR = 2,
  TRCALC_TARGET_MACKEY = 3,
  TRCALC_TARGET_E3ALG = 4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum TrcalcTarget TrcalcTarget;
#else
typedef uint32_t TrcalcTarget;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque handle to a computed chart.
typedef struct TrcalcChart TrcalcChart;

// Borrowed view of one cell. The pointers stay valid until the chart is freed.
typedef struct TrcalcCell {
  const uint64_t *deg;
  size_t deg_len;
  int64_t dim;
  // Exponents e_i of ⊕ Z/p^{e_i}, ascending.
  const uint32_t *exps;
  size_t exps_len;
} TrcalcCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Computes a closed-form chart over all multidegrees of `vars` variables with
// total weight at most `max_weight` and dimensions `0..=max_dim`. `i` is the
// filtration index for the filtration and graded targets and is ignored
// otherwise. On success `*out` owns a chart to release with
// [`trcalc_chart_free`].
//
// # Safety
// `out` must be null or valid for a pointer write.
enum TrcalcStatus trcalc_chart_compute(uint32_t target,
                                       uint64_t p,
                                       uint32_t r,
                                       size_t vars,
                                       uint64_t max_weight,
                                       int64_t max_dim,
                                       uint32_t i,
                                       struct TrcalcChart **out);

// Computes the E_2 page for the multidegree `deg[0..deg_len]` and compares
// it with the closed forms through filtration `i`. Returns `Ok` when every
// cell agrees and `Fail` otherwise; in both cases `*out` receives the page.
// `kmax` and `denom` of 0 select the defaults.
//
// # Safety
// `deg` must point to `deg_len` readable values; `out` must be null or
// valid for a pointer write.
enum TrcalcStatus trcalc_descent_verify(uint64_t p,
                                        uint32_t r,
                                        const uint64_t *deg,
                                        size_t deg_len,
                                        int64_t max_dim,
                                        uint32_t i,
                                        size_t kmax,
                                        uint32_t denom,
                                        struct TrcalcChart **out);

// Number of cells in a chart, or 0 for a null handle.
//
// # Safety
// `chart` must be null or a live handle.
size_t trcalc_chart_cell_count(const struct TrcalcChart *chart);

// Fills `*out` with a view of cell `index`.
//
// # Safety
// `chart` must be null or a live handle; `out` must be null or writable.
enum TrcalcStatus trcalc_chart_cell(const struct TrcalcChart *chart,
                                    size_t index,
                                    struct TrcalcCell *out);

// Serializes a chart in the CLI's JSON format. Free the string with
// [`trcalc_string_free`].
//
// # Safety
// `chart` must be null or a live handle; `out` must be null or writable.
enum TrcalcStatus trcalc_chart_to_json(const struct TrcalcChart *chart, char **out);

// Exponents of π_{2a} of the fixed points of S^V ∧ THH(F_p) under the group
// of order p^{r-1}, where V has rotation numbers `rotations[0..len]`.
// Writes at most `cap` exponents and always stores the full count in
// `*len_out`, so a call with `cap = 0` sizes the buffer.
//
// # Safety
// `rotations` must point to `len` values; `exps` must have room for `cap`
// values (or be null with `cap = 0`); `len_out` must be writable.
enum TrcalcStatus trcalc_smash_homotopy(uint64_t p,
                                        const uint64_t *rotations,
                                        size_t len,
                                        uint32_t r,
                                        int64_t a,
                                        uint32_t *exps,
                                        size_t cap,
                                        size_t *len_out);

// Releases a chart. Null is ignored.
//
// # Safety
// `chart` must be null or a handle not yet freed.
void trcalc_chart_free(struct TrcalcChart *chart);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void trcalc_string_free(char *s);

// Message for the last failing call on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *trcalc_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRCALC_H */
