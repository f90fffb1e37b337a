#ifndef TWOMODE_H
#define TWOMODE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TM_OK 0

/**
 * Null pointer, unknown enum value or similar caller error.
 */
#define TM_ERR_ARGUMENT 1

/**
 * Parameters, state or configuration rejected by validation.
 */
#define TM_ERR_CONFIG 2

/**
 * Integration or root finding failed (pole approach, step failure, no transition).
 */
#define TM_ERR_NUMERICAL 3

/**
 * The trajectory could not be given a regime label.
 */
#define TM_ERR_UNCLASSIFIABLE 5

/**
 * The output buffer is too small; the required size has been written.
 */
#define TM_ERR_BUFFER 6

/**
 * A Rust panic was caught at the boundary.
 */
#define TM_ERR_PANIC 7

#define TM_MODE_ZERO 0

#define TM_MODE_PI 1

#define TM_PHASE_ZERO 0

#define TM_PHASE_PI 1

#define TM_PHASE_RUNNING 2

#define TM_TRAP_OSCILLATORY 0

#define TM_TRAP_MQST_SEPARATED 1

#define TM_TRAP_MQST_COEXISTING 2

#define TM_TRAP_SWAPPING_AVOIDING 3

#define TM_TRAP_SWAPPING_CHASING 4

/**
 * Opaque model parameters.
 */
typedef struct TmParams TmParams;

/**
 * Opaque sampled trajectory.
 */
typedef struct TmTrajectory TmTrajectory;

/**
 * Regime label of a trajectory.
 */
typedef struct TmLabel {
  int phase_class_a;
  int phase_class_b;
  int trapping;
  double mean_z_a;
  double mean_z_b;
  double corr_zz;
} TmLabel;

/**
 * An equilibrium with common phase `0` or `pi`.
 */
typedef struct TmFixedPoint {
  double z_a;
  double z_b;
  /**
   * 1 if linearly stable.
   */
  int stable;
  double residual;
} TmFixedPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if the last call
 * succeeded. Valid until the next call into the library on this thread.
 */
const char *tm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tm_version(void);

/**
 * Symmetric parameters: `K_a = K_b = k`, `Lambda_a = Lambda_b = lambda`,
 * `f_a = f_b = 1/2`, constant tunnelling.
 */
int tm_params_new_symmetric(double k, double lambda, double lambda_ab, struct TmParams **out);

/**
 * General constant-tunnelling parameters.
 */
int tm_params_new(double f_a,
                  double k_a,
                  double k_b,
                  double lambda_a,
                  double lambda_b,
                  double lambda_ab,
                  struct TmParams **out);

/**
 * Parameters from their JSON form (all fields, including variable
 * tunnelling and overlap corrections).
 */
int tm_params_from_json(const char *json, struct TmParams **out);

void tm_params_free(struct TmParams *p);

/**
 * Time derivative of `state = [Z_a, Z_b, phi_a, phi_b]` into `out[4]`.
 */
int tm_eval_rhs(const struct TmParams *p, const double *state_in, double *out);

int tm_hamiltonian(const struct TmParams *p, const double *state_in, double *out);

/**
 * Integrates from `state` to `t_end`, sampling every `sample_interval`,
 * with the default tolerances (`1e-10`).
 */
int tm_integrate(const struct TmParams *p,
                 const double *state_in,
                 double t_end,
                 double sample_interval,
                 struct TmTrajectory **out);

void tm_trajectory_free(struct TmTrajectory *t);

/**
 * Number of samples, or 0 for a null handle.
 */
size_t tm_trajectory_len(const struct TmTrajectory *t);

/**
 * Copies sample `i`: time, `state[4]` and energy. Any output may be null.
 */
int tm_trajectory_sample(const struct TmTrajectory *t,
                         size_t i,
                         double *time,
                         double *state_out,
                         double *energy);

/**
 * Largest relative energy deviation from the first sample.
 */
int tm_trajectory_energy_drift(const struct TmTrajectory *t, double *out);

/**
 * Labels a trajectory with the default classifier settings.
 */
int tm_classify(const struct TmTrajectory *t, struct TmLabel *out);

/**
 * Static NUL-terminated name of a trapping code, or null if unknown.
 */
const char *tm_trapping_name(int code);

/**
 * Small-oscillation frequencies about the trivial point of `mode`:
 * squared values into `omega2[2]` (larger first) and `*stable`.
 */
int tm_normal_modes(const struct TmParams *p, int m, double *omega2, int *stable);

/**
 * Critical `Lambda` for `Lambda_ab = ratio * Lambda` with the template's `K`.
 */
int tm_critical_lambda(const struct TmParams *p, int m, double ratio, double *out);

/**
 * Equilibria of `mode`: closed form for symmetric parameters, Newton from
 * the default seed grid otherwise. Writes at most `capacity` points and
 * the total count into `*count`; returns `TM_ERR_BUFFER` if they did not fit.
 */
int tm_fixed_points(const struct TmParams *p,
                    int m,
                    struct TmFixedPoint *out,
                    size_t capacity,
                    size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOMODE_H */
