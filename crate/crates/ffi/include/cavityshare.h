#ifndef CAVITYSHARE_H
#define CAVITYSHARE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsFreezeKind {
  CS_FREEZE_KIND_THAWING = 0,
  CS_FREEZE_KIND_FROZEN = 1,
} CsFreezeKind;

typedef enum CsInitKind {
  // `|1,g,g>`.
  CS_INIT_KIND_CAVITY_EXCITED = 0,
  // `cos θ |0,e,g> + sin θ |0,g,e>`, θ in radians.
  CS_INIT_KIND_BELL_THETA = 1,
  // Arbitrary normalized `(a0, a1, a2)`.
  CS_INIT_KIND_GENERAL = 2,
} CsInitKind;

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_NOT_NORMALIZED = 3,
  CS_STATUS_OUT_OF_RANGE = 4,
  CS_STATUS_PANIC = 5,
} CsStatus;

// Result of [`cs_detect`].
typedef struct CsIntervals CsIntervals;

// Model parameters.
typedef struct CsModel CsModel;

// Result of [`cs_sweep`].
typedef struct CsSweepGrid CsSweepGrid;

// Initial condition. `theta` is read for `BellTheta`, `re`/`im` for `General`.
typedef struct CsInitial {
  enum CsInitKind kind;
  double theta;
  double re[3];
  double im[3];
} CsInitial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *cs_last_error(void);

// Creates a model with coupling `g > 0`, cavity frequency `omega` and
// detuning `delta = omega0 − omega`.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum CsStatus cs_model_new(double g, double omega, double delta, struct CsModel **out);

// # Safety
// `model` must come from [`cs_model_new`] and not be freed twice. Null is a no-op.
void cs_model_free(struct CsModel *model);

// `G = √8 g`, or NaN for a null handle.
//
// # Safety
// `model` must be null or a live handle.
double cs_model_big_g(const struct CsModel *model);

// Physical time for `τ = Gt/π`, or NaN for a null handle.
//
// # Safety
// `model` must be null or a live handle.
double cs_model_time_from_tau(const struct CsModel *model, double tau);

// Slow-frame amplitudes at `τ`, written as `re[3]`, `im[3]`.
//
// # Safety
// Pointers must be valid; `re` and `im` must hold 3 doubles each.
enum CsStatus cs_evolve(const struct CsModel *model,
                        const struct CsInitial *init,
                        double tau,
                        double *re,
                        double *im);

// `(Y0, Y1, Y2)` of the state `(re[k] + i·im[k])`, written to `y[3]`.
//
// # Safety
// `re` and `im` must point to 3 doubles, `y` to room for 3.
enum CsStatus cs_entanglement(const double *re, const double *im, double *y);

// Closed-form `Y_S(τ)` for the cavity-excited start.
double cs_ys_class1(double tau);

// Closed-form `Y_S(τ)` for the Bell-θ start, θ in radians.
double cs_ys_class2(double theta, double tau);

// `Y_S(τ)` through the amplitudes, any detuning.
//
// # Safety
// Pointers must be valid.
enum CsStatus cs_ys_dynamic(const struct CsModel *model,
                            const struct CsInitial *init,
                            double tau,
                            double *out);

// Frozen/thawing intervals of `Y_S` on `[start, end]`.
//
// # Safety
// Pointers must be valid; free the result with [`cs_intervals_free`].
enum CsStatus cs_detect(const struct CsModel *model,
                        const struct CsInitial *init,
                        double start,
                        double end,
                        double freeze_tol,
                        double scan_step,
                        struct CsIntervals **out);

// Number of intervals, 0 for null.
//
// # Safety
// `h` must be null or a live handle.
size_t cs_intervals_len(const struct CsIntervals *h);

// # Safety
// Pointers must be valid.
enum CsStatus cs_intervals_get(const struct CsIntervals *h,
                               size_t index,
                               double *t_start,
                               double *t_end,
                               enum CsFreezeKind *kind);

// # Safety
// `h` must come from [`cs_detect`]. Null is a no-op.
void cs_intervals_free(struct CsIntervals *h);

// `Y_S` over `theta_over_pi[rows] × tau[cols]` for Bell-θ starts.
//
// # Safety
// Arrays must hold the stated counts; free the result with [`cs_sweep_free`].
enum CsStatus cs_sweep(const struct CsModel *model,
                       const double *theta_over_pi,
                       size_t rows,
                       const double *tau,
                       size_t cols,
                       struct CsSweepGrid **out);

// # Safety
// `h` must be null or a live handle.
size_t cs_sweep_rows(const struct CsSweepGrid *h);

// # Safety
// `h` must be null or a live handle.
size_t cs_sweep_cols(const struct CsSweepGrid *h);

// Row-major values, `rows × cols` long, owned by the handle.
//
// # Safety
// `h` must be null or a live handle.
const double *cs_sweep_values(const struct CsSweepGrid *h);

// # Safety
// Pointers must be valid.
enum CsStatus cs_sweep_value(const struct CsSweepGrid *h, size_t row, size_t col, double *out);

// # Safety
// `h` must come from [`cs_sweep`]. Null is a no-op.
void cs_sweep_free(struct CsSweepGrid *h);

// Hamiltonian block of excitation number `m`, row-major into `out`
// (capacity `cap` doubles). `*dim` receives the block dimension
// (1 for `m = 0`, 3 for `m = 1`, 4 above).
//
// # Safety
// Pointers must be valid; `out` must hold `cap` doubles.
enum CsStatus cs_build_block(const struct CsModel *model,
                             int64_t m,
                             double *out,
                             size_t cap,
                             size_t *dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITYSHARE_H */
