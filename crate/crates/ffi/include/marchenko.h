#ifndef MARCHENKO_H
#define MARCHENKO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MkStatus {
  MK_OK = 0,
  // A required pointer argument was null.
  MK_NULL_POINTER = 1,
  // Input data or configuration did not validate.
  MK_INVALID_INPUT = 2,
  // A solver stage failed.
  MK_SOLVER_FAILURE = 3,
  // The scattering matrix had not settled on the tail window.
  MK_TAIL_NOT_SETTLED = 4,
  // Index out of range.
  MK_OUT_OF_RANGE = 5,
  // Internal panic; the handle arguments should be considered unusable.
  MK_PANIC = 6,
} MkStatus;

typedef enum MkVerdict {
  MK_PASS = 0,
  MK_FAIL = 1,
  MK_INCONCLUSIVE = 2,
} MkVerdict;

typedef struct MkBoundary MkBoundary;

typedef struct MkPotential MkPotential;

typedef struct MkRecovered MkRecovered;

typedef struct MkScattering MkScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *mk_last_error_message(void);

// Frees a string returned by the library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void mk_string_free(char *s);

// # Safety
// `out` must be valid for writes.
enum MkStatus mk_potential_zero(size_t n, double x_max, struct MkPotential **out_p);

// `amplitude · exp(-rate · x)` with a hermitian `n×n` amplitude.
//
// # Safety
// `amp_re` (and `amp_im` unless null) must hold `n·n` values.
enum MkStatus mk_potential_exponential(size_t n,
                                       const double *amp_re,
                                       const double *amp_im,
                                       double rate,
                                       double x_max,
                                       struct MkPotential **out_p);

// Piecewise-constant potential: layer `l` occupies `(ends[l-1], ends[l])`
// with `ends[-1] = 0`.
//
// # Safety
// `ends` must hold `layers` values, `re`/`im` `layers·n·n` values.
enum MkStatus mk_potential_step(size_t n,
                                size_t layers,
                                const double *ends,
                                const double *re,
                                const double *im,
                                double x_max,
                                struct MkPotential **out_p);

// Samples on an increasing grid, interpolated by cubic Hermite splines.
//
// # Safety
// `x` must hold `count` values, `re`/`im` `count·n·n` values.
enum MkStatus mk_potential_sampled(size_t n,
                                   size_t count,
                                   const double *x,
                                   const double *re,
                                   const double *im,
                                   double x_max,
                                   struct MkPotential **out_p);

// # Safety
// `json` must be a NUL-terminated string.
enum MkStatus mk_potential_from_json(const char *json, struct MkPotential **out_p);

// Dimension `n`, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t mk_potential_dim(const struct MkPotential *p);

// `V(x)` into `n·n` row-major buffers.
//
// # Safety
// `re` (and `im` unless null) must have room for `n·n` values.
enum MkStatus mk_potential_eval(const struct MkPotential *p, double x, double *re, double *im);

// # Safety
// `p` must be null or a handle not freed before.
void mk_potential_free(struct MkPotential *p);

// `-B†ψ(0) + A†ψ′(0) = 0` from row-major `A` and `B`.
//
// # Safety
// Each non-null array must hold `n·n` values.
enum MkStatus mk_boundary_new(size_t n,
                              const double *a_re,
                              const double *a_im,
                              const double *b_re,
                              const double *b_im,
                              struct MkBoundary **out_b);

// `A = diag(-sin θ)`, `B = diag(cos θ)`.
//
// # Safety
// `thetas` must hold `n` values.
enum MkStatus mk_boundary_from_angles(size_t n, const double *thetas, struct MkBoundary **out_b);

// # Safety
// `bc` must be a live handle; output arrays must have room for `n·n` values.
enum MkStatus mk_boundary_matrices(const struct MkBoundary *bc,
                                   double *a_re,
                                   double *a_im,
                                   double *b_re,
                                   double *b_im);

// Distance of the projectors onto the column spaces of `[A; B]`; zero
// exactly when the two conditions are equivalent.
//
// # Safety
// `x` and `y` must be live handles; `dist` valid for writes.
enum MkStatus mk_boundary_distance(const struct MkBoundary *x,
                                   const struct MkBoundary *y,
                                   double *dist);

// # Safety
// `bc` must be null or a handle not freed before.
void mk_boundary_free(struct MkBoundary *bc);

// Scattering matrix on the configured k-grid plus bound states.
//
// # Safety
// Handles must be live; `config_json` null or NUL-terminated.
enum MkStatus mk_direct(const struct MkPotential *p,
                        const struct MkBoundary *bc,
                        const char *config_json,
                        struct MkScattering **out_s);

// # Safety
// `json` must be a NUL-terminated string.
enum MkStatus mk_scattering_from_json(const char *json, struct MkScattering **out_s);

// Serializes to the `scattering.json` layout; free with [`mk_string_free`].
//
// # Safety
// `s` must be a live handle; `json` valid for writes.
enum MkStatus mk_scattering_to_json(const struct MkScattering *s, char **json);

// # Safety
// `s` must be null or a live handle.
size_t mk_scattering_dim(const struct MkScattering *s);

// Number of k-grid points.
//
// # Safety
// `s` must be null or a live handle.
size_t mk_scattering_len(const struct MkScattering *s);

// `k_i` and `S(k_i)`.
//
// # Safety
// `s` must be a live handle, `k` valid for writes and `re`/`im` room for `n·n` values.
enum MkStatus mk_scattering_point(const struct MkScattering *s,
                                  size_t index,
                                  double *k,
                                  double *re,
                                  double *im);

// Number of distinct bound states.
//
// # Safety
// `s` must be null or a live handle.
size_t mk_scattering_bound_count(const struct MkScattering *s);

// `κ_j`, multiplicity and `M_j`.
//
// # Safety
// `s` must be a live handle, scalar outputs valid for writes and `re`/`im` room for `n·n` values.
enum MkStatus mk_scattering_bound_state(const struct MkScattering *s,
                                        size_t index,
                                        double *kappa,
                                        size_t *multiplicity,
                                        double *re,
                                        double *im);

// # Safety
// `s` must be null or a handle not freed before.
void mk_scattering_free(struct MkScattering *s);

// Potential and boundary condition recovered from scattering data.
//
// # Safety
// `s` must be a live handle; `config_json` null or NUL-terminated.
enum MkStatus mk_invert(const struct MkScattering *s,
                        const char *config_json,
                        struct MkRecovered **out_r);

// Copy of the recovered potential as a new handle.
//
// # Safety
// `r` must be a live handle; `out_p` valid for writes.
enum MkStatus mk_recovered_potential(const struct MkRecovered *r, struct MkPotential **out_p);

// Copy of the recovered boundary condition as a new handle.
//
// # Safety
// `r` must be a live handle; `out_b` valid for writes.
enum MkStatus mk_recovered_boundary(const struct MkRecovered *r, struct MkBoundary **out_b);

// Serializes to the `recovered.json` layout; free with [`mk_string_free`].
//
// # Safety
// `r` must be a live handle; `json` valid for writes.
enum MkStatus mk_recovered_to_json(const struct MkRecovered *r, char **json);

// # Safety
// `r` must be null or a handle not freed before.
void mk_recovered_free(struct MkRecovered *r);

// Marchenko-class and Levinson checks. `config_json` is an inverse
// configuration; `report_json` may be null, otherwise it receives the
// report to be freed with [`mk_string_free`].
//
// # Safety
// `s` must be a live handle and `verdict` valid for writes.
enum MkStatus mk_validate(const struct MkScattering *s,
                          const char *config_json,
                          enum MkVerdict *verdict,
                          char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MARCHENKO_H */
