/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef TORICRAY_H
#define TORICRAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TrStatus {
  TR_STATUS_OK = 0,
  TR_STATUS_NULL_POINTER = 1,
  TR_STATUS_INVALID_ARGUMENT = 2,
  TR_STATUS_WINDOW_TOO_SMALL = 3,
  TR_STATUS_NOT_CONVERGED = 4,
  TR_STATUS_INCONSISTENT = 5,
  TR_STATUS_PANIC = 6,
} TrStatus;

/**
 * Polytope grid, primal window and reference potential.
 */
typedef struct TrGeometry TrGeometry;

/**
 * A torus-invariant potential stored through its symbol.
 */
typedef struct TrPotential TrPotential;

/**
 * A sampled ray or segment.
 */
typedef struct TrRay TrRay;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *tr_last_error_message(void);

/**
 * Creates a geometry with `n` polytope cells and `m` cells on `[-half_width, half_width]`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum TrStatus tr_geometry_new(size_t n, double half_width, size_t m, struct TrGeometry **out);

/**
 * # Safety
 * `geom` must be null or a pointer returned by `tr_geometry_new` not yet freed.
 */
void tr_geometry_free(struct TrGeometry *geom);

/**
 * Polytope spacing `1/N`, or NaN for a null handle.
 *
 * # Safety
 * `geom` must be null or a live geometry handle.
 */
double tr_geometry_h(const struct TrGeometry *geom);

/**
 * Number of symbol nodes (`N + 1`), or 0 for a null handle.
 *
 * # Safety
 * `geom` must be null or a live geometry handle.
 */
size_t tr_geometry_nodes(const struct TrGeometry *geom);

/**
 * Builds a catalogue potential such as `"NU(0.3)"`, `"EINF"` or `"BUMP(7)"`.
 *
 * # Safety
 * `geom` must be a live geometry handle, `name` a NUL-terminated string and
 * `out` writable.
 */
enum TrStatus tr_potential_zoo(const struct TrGeometry *geom,
                               const char *name,
                               struct TrPotential **out);

/**
 * Builds a potential from its symbol at the `N + 1` polytope nodes.
 *
 * `+inf` marks nodes outside the effective domain. The values must be convex.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be writable.
 */
enum TrStatus tr_potential_from_symbol(const struct TrGeometry *geom,
                                       const double *values,
                                       size_t len,
                                       struct TrPotential **out);

/**
 * # Safety
 * `pot` must be null or a live potential handle.
 */
void tr_potential_free(struct TrPotential *pot);

/**
 * `pot + c` as a new handle.
 *
 * # Safety
 * `pot` must be a live potential handle and `out` writable.
 */
enum TrStatus tr_potential_shift(const struct TrPotential *pot, double c, struct TrPotential **out);

/**
 * Copies the symbol into `values`, which must hold `N + 1` doubles.
 *
 * # Safety
 * `values` must point to `len` writable doubles.
 */
enum TrStatus tr_potential_symbol(const struct TrPotential *pot, double *values, size_t len);

/**
 * Relative potential `phi~(x) = f(x) - f0(x)` at a real point `x`.
 *
 * # Safety
 * `pot` must be a live potential handle and `out` writable.
 */
enum TrStatus tr_potential_eval(const struct TrPotential *pot, double x, double *out);

/**
 * Aubin-Mabuchi energy of a bounded potential.
 *
 * # Safety
 * `pot` must be a live potential handle and `out` writable.
 */
enum TrStatus tr_am(const struct TrPotential *pot, double *out);

/**
 * Energy-slope and mass-deficit estimates of `c_psi` relative to `phi`.
 *
 * # Safety
 * Both handles must be live; `c_slope` and `c_mass` must be writable.
 */
enum TrStatus tr_c_psi(const struct TrPotential *psi,
                       const struct TrPotential *phi,
                       double *c_slope,
                       double *c_mass);

/**
 * Full-mass membership; fails with `Inconsistent` when the two criteria disagree.
 *
 * # Safety
 * `psi` must be a live potential handle and `out` writable.
 */
enum TrStatus tr_is_in_e(const struct TrPotential *psi, bool *out);

/**
 * Envelope `P[psi](phi)`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum TrStatus tr_envelope(const struct TrPotential *psi,
                          const struct TrPotential *phi,
                          struct TrPotential **out);

/**
 * Ray from `phi` towards the singularity type of `psi <= phi`, by cutoffs.
 *
 * # Safety
 * Both handles must be live, `t` must point to `nt` readable doubles and
 * `out` must be writable.
 */
enum TrStatus tr_ray_cutoff(const struct TrPotential *phi,
                            const struct TrPotential *psi,
                            const double *t,
                            size_t nt,
                            struct TrRay **out);

/**
 * The same ray built through the Legendre transform in time of the test curve.
 *
 * # Safety
 * Same as `tr_ray_cutoff`.
 */
enum TrStatus tr_ray_rwn(const struct TrPotential *phi,
                         const struct TrPotential *psi,
                         const double *t,
                         size_t nt,
                         struct TrRay **out);

/**
 * # Safety
 * `ray` must be null or a live ray handle.
 */
void tr_ray_free(struct TrRay *ray);

/**
 * Number of time samples, or 0 for a null handle.
 *
 * # Safety
 * `ray` must be null or a live ray handle.
 */
size_t tr_ray_len(const struct TrRay *ray);

/**
 * Copy of the potential at sample `k`.
 *
 * # Safety
 * `ray` must be a live ray handle and `out` writable.
 */
enum TrStatus tr_ray_potential(const struct TrRay *ray, size_t k, struct TrPotential **out);

/**
 * Energies along the ray into `values`, which must hold `tr_ray_len` doubles.
 *
 * # Safety
 * `values` must point to `len` writable doubles.
 */
enum TrStatus tr_ray_energies(const struct TrRay *ray, double *values, size_t len);

/**
 * Largest window distance between two rays sampled at the same times.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum TrStatus tr_ray_distance(const struct TrRay *a, const struct TrRay *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORICRAY_H */
