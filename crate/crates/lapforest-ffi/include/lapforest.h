#ifndef LAPFOREST_H
#define LAPFOREST_H

/* Generated by cbindgen from lapforest-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Long-run matrix mode.
typedef enum LfLongRunMode {
  // Repeated squaring; requires a stochastic P with positive diagonal.
  LF_LONG_RUN_MODE_POWER = 0,
  // Cesaro averaging; requires a stochastic P.
  LF_LONG_RUN_MODE_CESARO = 1,
} LfLongRunMode;

// Status codes returned by every fallible call.
typedef enum LfStatus {
  // Success.
  LF_STATUS_OK = 0,
  // A pointer was null or an argument out of range.
  LF_STATUS_INVALID_ARGUMENT = 1,
  // The edge-list text was rejected; see `lf_last_error_message`.
  LF_STATUS_PARSE_ERROR = 2,
  // A numeric routine failed to converge or was ill-conditioned.
  LF_STATUS_NUMERICAL_ERROR = 3,
  // The graph exceeds the forest enumeration limit or family budget.
  LF_STATUS_TOO_LARGE = 4,
  // An output buffer has the wrong length.
  LF_STATUS_BAD_BUFFER_LENGTH = 5,
  // A precondition on the dynamics was violated (step size, mode).
  LF_STATUS_PRECONDITION_VIOLATED = 6,
} LfStatus;

// Opaque digraph handle.
typedef struct LfDigraph LfDigraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *lf_last_error_message(void);

// Parses an edge-list text ("n m" header, then "i j [w]" lines) into a new
// digraph handle.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum LfStatus lf_digraph_parse(const char *text, struct LfDigraph **out);

// Releases a digraph handle. Passing null is a no-op.
//
// # Safety
// `g` must have been returned by [`lf_digraph_parse`] and not freed before.
void lf_digraph_free(struct LfDigraph *g);

// # Safety
// `g` must be a live handle from [`lf_digraph_parse`].
uintptr_t lf_digraph_vertex_count(const struct LfDigraph *g);

// # Safety
// `g` must be a live handle from [`lf_digraph_parse`].
uintptr_t lf_digraph_arc_count(const struct LfDigraph *g);

// Writes the Laplacian L = D - A row-major into `out` (`len == n * n`).
//
// # Safety
// `g` must be a live handle; `out` must point to `len` writable doubles.
enum LfStatus lf_digraph_laplacian(const struct LfDigraph *g, double *out, uintptr_t len);

// The in-forest dimension by the structural route (number of sink SCCs).
//
// # Safety
// `g` must be a live handle; `out` must be a valid pointer.
enum LfStatus lf_forest_dimension(const struct LfDigraph *g, uintptr_t *out);

// Writes the normalized matrix of maximal in-forests into `out`
// (`len == n * n`), the exact enumeration route.
//
// # Safety
// `g` must be a live handle; `out` must point to `len` writable doubles.
enum LfStatus lf_forest_matrix(const struct LfDigraph *g, double *out, uintptr_t len);

// Writes the resolvent projector (I + tau L)^{-1} into `out`. Pass
// `tau <= 0` for the default 1e8.
//
// # Safety
// `g` must be a live handle; `out` must point to `len` writable doubles.
enum LfStatus lf_resolvent_projector(const struct LfDigraph *g,
                                     double tau,
                                     double *out,
                                     uintptr_t len);

// Writes the long-run limit of P = I - eps L into `out`. Pass
// `epsilon <= 0` for the default 1/(2 max out-degree).
//
// # Safety
// `g` must be a live handle; `out` must point to `len` writable doubles.
enum LfStatus lf_long_run_matrix(const struct LfDigraph *g,
                                 double epsilon,
                                 enum LfLongRunMode mode,
                                 double *out,
                                 uintptr_t len);

// Writes the eigenvalues of L (sorted by real, then imaginary part) into
// `out_re` / `out_im`, each of length `len == n`.
//
// # Safety
// `g` must be a live handle; both outputs must point to `len` writable doubles.
enum LfStatus lf_spectrum(const struct LfDigraph *g, double *out_re, double *out_im, uintptr_t len);

// Runs the full cross-check battery and returns the JSON report as a
// NUL-terminated string (release with [`lf_string_free`]). Pass
// `tau <= 0` and/or `epsilon <= 0` for the defaults.
//
// # Safety
// `g` must be a live handle; `out_json` must be a valid pointer.
enum LfStatus lf_analyze_json(const struct LfDigraph *g,
                              double tau,
                              double epsilon,
                              char **out_json);

// Simulates the discrete iteration x(k+1) = (I - eps L) x(k) for `steps`
// steps and returns the trajectory as CSV (`t,x0,...`). Pass
// `epsilon <= 0` for the default.
//
// # Safety
// `g` must be a live handle; `x0` must point to `x0_len` readable doubles;
// `out_csv` must be a valid pointer.
enum LfStatus lf_simulate_discrete_csv(const struct LfDigraph *g,
                                       double epsilon,
                                       const double *x0,
                                       uintptr_t x0_len,
                                       uintptr_t steps,
                                       char **out_csv);

// Integrates x' = -L x to `t_end` and returns the trajectory as CSV. Pass
// `dt <= 0` for the default 0.25 / max out-degree.
//
// # Safety
// `g` must be a live handle; `x0` must point to `x0_len` readable doubles;
// `out_csv` must be a valid pointer.
enum LfStatus lf_simulate_continuous_csv(const struct LfDigraph *g,
                                         const double *x0,
                                         uintptr_t x0_len,
                                         double t_end,
                                         double dt,
                                         char **out_csv);

// Releases a string returned by this library. Passing null is a no-op.
//
// # Safety
// `s` must have been returned by a `lf_*` call and not freed before.
void lf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAPFOREST_H */
