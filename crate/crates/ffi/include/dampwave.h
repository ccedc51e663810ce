#ifndef DAMPWAVE_H
#define DAMPWAVE_H

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum DwStatus {
  DW_OK = 0,
  DW_NULL_POINTER = 1,
  DW_INVALID_INPUT = 2,
  DW_PARAMETER = 3,
  DW_NON_FINITE = 4,
  DW_BLOW_UP = 5,
  DW_CONFIG = 6,
  DW_IO = 7,
  DW_PANIC = 8,
} DwStatus;

// Diagnostic series stored in a trajectory.
typedef enum DwSeries {
  DW_TIMES = 0,
  DW_L2_NORM = 1,
  DW_SOBOLEV_NORM = 2,
  DW_ENERGY = 3,
  DW_DISSIPATION = 4,
  DW_TRANSPORT = 5,
} DwSeries;

// Fourier coefficients for wavenumbers `-K..=K`.
typedef struct DwField DwField;

// Model parameters, including the damper.
typedef struct DwParams DwParams;

// Sampled diagnostics and final state of one simulation.
typedef struct DwTrajectory DwTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *dw_last_error(void);

// Number of coefficients for truncation `K`, i.e. `2K + 1`.
size_t dw_coeff_count(size_t k_max);

// Builds a field from `2K + 1` real and imaginary parts ordered `k = -K..K`.
enum DwStatus dw_field_new(size_t k_max, const double *re, const double *im, struct DwField **out);

// Random data with `⟨k⟩^{-σ-0.55}` Gaussian coefficients, unit `H^σ` norm.
enum DwStatus dw_field_random(size_t k_max, double sigma, uint64_t seed, struct DwField **out);

size_t dw_field_k_max(const struct DwField *field);

// Copies the coefficients out; `len` must be at least `2K + 1`.
enum DwStatus dw_field_coeffs(const struct DwField *field, double *re, double *im, size_t len);

void dw_field_free(struct DwField *field);

// Capillary preset: α = 3/2, σ = 3, no damper.
enum DwStatus dw_params_capillary(double eps, struct DwParams **out);

// Gravity preset: α = 1/2, σ = 2, no damper.
enum DwStatus dw_params_gravity(double eps, struct DwParams **out);

// Installs the smooth cutoff supported on `[a, b]` with ramps of width
// `delta`, resolved to wavenumber `k_work`.
enum DwStatus dw_params_set_cutoff(struct DwParams *params,
                                   double a,
                                   double b,
                                   double delta,
                                   double amplitude,
                                   size_t k_work);

enum DwStatus dw_params_set_transport(struct DwParams *params, int on);

void dw_params_free(struct DwParams *params);

// `∂ₜv` of the rescaled equation.
enum DwStatus dw_rhs(const struct DwParams *params,
                     const struct DwField *field,
                     struct DwField **out);

// Energy of the flavor selected by the parameters.
enum DwStatus dw_energy(const struct DwParams *params, const struct DwField *field, double *out);

// Integrates to `t_end` with Lawson RK4 and step `min(dt, safety·ε)`,
// sampling every `stride` steps. A blow-up returns `DW_BLOW_UP` and still
// hands back the truncated trajectory.
enum DwStatus dw_simulate(const struct DwParams *params,
                          const struct DwField *initial,
                          double dt,
                          double safety,
                          double t_end,
                          size_t stride,
                          struct DwTrajectory **out);

// Number of samples in each series.
size_t dw_trajectory_len(const struct DwTrajectory *traj);

// Copies one series; `len` must be at least `dw_trajectory_len`.
enum DwStatus dw_trajectory_series(const struct DwTrajectory *traj,
                                   enum DwSeries which,
                                   double *out,
                                   size_t len);

// The state at the last completed step, as a new field.
enum DwStatus dw_trajectory_final_state(const struct DwTrajectory *traj, struct DwField **out);

void dw_trajectory_free(struct DwTrajectory *traj);

// Runs one harness experiment from config text, writing its outputs under
// `out_dir`. `exit_code` receives the CLI exit code (0 pass, 1 verdict
// failure, 2 usage error, 3 blow-up); the status reports only whether the
// run could be attempted at all.
enum DwStatus dw_run_config(const char *config, const char *out_dir, int *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAMPWAVE_H */
