#ifndef SACSIM_H
#define SACSIM_H

/* Generated from the sacsim-ffi crate sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every FFI call.
 */
typedef enum SacsimStatus {
  /**
   * The call succeeded.
   */
  SACSIM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SACSIM_STATUS_NULL_POINTER = 1,
  /**
   * Arguments were malformed: domain violations, wrong buffer
   * lengths, or inconsistent dimensions.
   */
  SACSIM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation failed numerically: structural checks,
   * invariant breaches, or non-convergence.
   */
  SACSIM_STATUS_NUMERICAL_FAILURE = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  SACSIM_STATUS_PANIC = 4,
} SacsimStatus;

/**
 * Opaque handle: a Hermitian generator of the dynamics.
 */
typedef struct SacsimHamiltonian SacsimHamiltonian;

/**
 * Opaque handle: a phase-space particle configuration.
 */
typedef struct SacsimParticleSet SacsimParticleSet;

/**
 * Opaque handle: a normalized state vector.
 */
typedef struct SacsimState SacsimState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static NUL-terminated string.
 */
const char *sacsim_version(void);

/**
 * Returns the message of the most recent failure on this thread, or
 * null if none occurred. The pointer stays valid until the next
 * failing call on the same thread; copy it if you need it longer.
 */
const char *sacsim_last_error_message(void);

/**
 * Builds a state from `dim` complex amplitudes, rescaling them to unit
 * norm. Fails on a zero or non-finite input vector.
 */
enum SacsimStatus sacsim_state_new(size_t dim,
                                   const double *re,
                                   const double *im,
                                   struct SacsimState **out);

/**
 * Releases a state handle. Null is ignored.
 */
void sacsim_state_free(struct SacsimState *state);

/**
 * Writes the state dimension into `out_dim`.
 */
enum SacsimStatus sacsim_state_dim(const struct SacsimState *state, size_t *out_dim);

/**
 * Copies the amplitudes into caller buffers of exactly `len == dim`
 * doubles each.
 */
enum SacsimStatus sacsim_state_amplitudes(const struct SacsimState *state,
                                          double *re_out,
                                          double *im_out,
                                          size_t len);

/**
 * Writes |<a|b>|^2 into `out`.
 */
enum SacsimStatus sacsim_state_fidelity(const struct SacsimState *a,
                                        const struct SacsimState *b,
                                        double *out);

/**
 * Builds a Hamiltonian from a dense row-major `dim x dim` Hermitian
 * matrix.
 */
enum SacsimStatus sacsim_hamiltonian_new(size_t dim,
                                         const double *re,
                                         const double *im,
                                         struct SacsimHamiltonian **out);

/**
 * Releases a Hamiltonian handle. Null is ignored.
 */
void sacsim_hamiltonian_free(struct SacsimHamiltonian *h);

/**
 * Writes the Hamiltonian dimension into `out_dim`.
 */
enum SacsimStatus sacsim_hamiltonian_dim(const struct SacsimHamiltonian *h, size_t *out_dim);

/**
 * Maps a state onto its phase-space particle configuration in the
 * computational frame: particle `i` sits at `(q_i, p_i) = (Re c_i,
 * Im c_i)`.
 */
enum SacsimStatus sacsim_particles_new(const struct SacsimState *state,
                                       struct SacsimParticleSet **out);

/**
 * Releases a particle-set handle. Null is ignored.
 */
void sacsim_particles_free(struct SacsimParticleSet *particles);

/**
 * Writes the particle count into `out_dim`.
 */
enum SacsimStatus sacsim_particles_dim(const struct SacsimParticleSet *particles, size_t *out_dim);

/**
 * Copies positions and momenta into caller buffers of exactly
 * `len == dim` doubles each.
 */
enum SacsimStatus sacsim_particles_read(const struct SacsimParticleSet *particles,
                                        double *q_out,
                                        double *p_out,
                                        size_t len);

/**
 * Writes |Σ (q² + p²) − 1| into `out`.
 */
enum SacsimStatus sacsim_particles_norm_deviation(const struct SacsimParticleSet *particles,
                                                  double *out);

/**
 * Reassembles the state encoded by a particle configuration.
 */
enum SacsimStatus sacsim_particles_to_state(const struct SacsimParticleSet *particles,
                                            struct SacsimState **out);

/**
 * Propagates a particle configuration for time `t` under the exact
 * symplectic flow of `h` and returns the final configuration as a new
 * handle.
 */
enum SacsimStatus sacsim_evolve_exact(const struct SacsimHamiltonian *h,
                                      const struct SacsimParticleSet *particles,
                                      double t,
                                      struct SacsimParticleSet **out);

/**
 * Runs state tomography on `state` with exact readout and copies the
 * reconstructed real description — `2(dim² − 1)` frame coordinates —
 * into `coords_out` (which must hold exactly `len` doubles). The
 * number of preparation runs consumed is written to `runs_out`.
 */
enum SacsimStatus sacsim_qst_description(const struct SacsimState *state,
                                         double *coords_out,
                                         size_t len,
                                         uint64_t *runs_out);

/**
 * Writes the operator-norm distance between two dense row-major
 * `dim x dim` matrices into `out`.
 */
enum SacsimStatus sacsim_operator_norm_distance(size_t dim,
                                                const double *a_re,
                                                const double *a_im,
                                                const double *b_re,
                                                const double *b_im,
                                                double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SACSIM_H */
