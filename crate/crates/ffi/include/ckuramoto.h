#ifndef CKURAMOTO_H
#define CKURAMOTO_H

/* Generated with cbindgen:0.26.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum CkControllerKind {
  CK_CONTROLLER_KIND_NONE = 0,
  CK_CONTROLLER_KIND_SWITCHED_FF = 1,
  CK_CONTROLLER_KIND_FF_SMC = 2,
  CK_CONTROLLER_KIND_COMPLEX_SMC = 3,
  CK_CONTROLLER_KIND_ROBERTS = 4,
  CK_CONTROLLER_KIND_HYBRID_RESET = 5,
} CkControllerKind;

/**
 * Result codes.
 */
typedef enum CkStatus {
  CK_STATUS_OK = 0,
  CK_STATUS_NULL_POINTER = 1,
  CK_STATUS_INVALID_ARGUMENT = 2,
  CK_STATUS_CONFIG = 3,
  CK_STATUS_SIMULATION = 4,
  CK_STATUS_ACCEPTANCE = 5,
  CK_STATUS_IO = 6,
  CK_STATUS_PANIC = 7,
} CkStatus;

/**
 * Opaque undirected graph.
 */
typedef struct CkNetwork CkNetwork;

/**
 * Opaque recorded run of the real phase model.
 */
typedef struct CkPhaseTrajectory CkPhaseTrajectory;

/**
 * Opaque recorded run of the complex model.
 */
typedef struct CkTrajectory CkTrajectory;

/**
 * Controller description. Only the fields used by `kind` are read:
 * `alpha` (FF_SMC), `gains` + `omega_bar` (COMPLEX_SMC), `mu` (ROBERTS;
 * NULL selects `mu = sigma * degree`), `window` (HYBRID_RESET). Arrays
 * hold `n` entries.
 */
typedef struct CkController {
  enum CkControllerKind kind;
  double alpha;
  double omega_bar;
  double window;
  const double *gains;
  const double *mu;
} CkController;

/**
 * Integration settings; `record_stride` of 0 is treated as 1.
 */
typedef struct CkSimConfig {
  double dt;
  double t_end;
  size_t record_stride;
  double boundary_layer_delta;
} CkSimConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. Valid until
 * the next call into this library from the same thread.
 */
const char *ck_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ck_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ck_string_free(char *s);

/**
 * Seeded Erdos-Renyi graph `G(n, p)`.
 *
 * # Safety
 * `out_net` must be a valid pointer.
 */
enum CkStatus ck_network_erdos_renyi(size_t n, double p, uint64_t seed, struct CkNetwork **out_net);

/**
 * Graph from `edge_count` pairs stored flat in `edges` (`k0, j0, k1, j1, ...`).
 *
 * # Safety
 * `edges` must hold `2 * edge_count` entries; `out_net` must be valid.
 */
enum CkStatus ck_network_from_edges(size_t n,
                                    const size_t *edges,
                                    size_t edge_count,
                                    struct CkNetwork **out_net);

/**
 * Graph from an edge-list file (`n <count>` header, one `k j` pair per line).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_net` must be valid.
 */
enum CkStatus ck_network_load(const char *path, struct CkNetwork **out_net);

/**
 * # Safety
 * `net` must come from this library and not be freed twice. NULL is ignored.
 */
void ck_network_free(struct CkNetwork *net);

/**
 * Node count, or 0 for NULL.
 *
 * # Safety
 * `net` must be NULL or a live handle.
 */
size_t ck_network_size(const struct CkNetwork *net);

/**
 * Edge count, or 0 for NULL.
 *
 * # Safety
 * `net` must be NULL or a live handle.
 */
size_t ck_network_edge_count(const struct CkNetwork *net);

/**
 * # Safety
 * `net` must be NULL or a live handle.
 */
bool ck_network_is_connected(const struct CkNetwork *net);

/**
 * Copies the `n` node degrees into `out_degrees`.
 *
 * # Safety
 * `out_degrees` must hold `ck_network_size(net)` entries.
 */
enum CkStatus ck_network_degrees(const struct CkNetwork *net, size_t *out_degrees);

/**
 * Integrates the controlled complex system from `x0 = x0_re + i x0_im`.
 *
 * # Safety
 * `omega`, `x0_re`, `x0_im` must hold `ck_network_size(net)` entries;
 * `ctrl` and `out_traj` must be valid.
 */
enum CkStatus ck_run_complex(const struct CkNetwork *net,
                             const double *omega,
                             double sigma,
                             const struct CkController *ctrl,
                             const double *x0_re,
                             const double *x0_im,
                             struct CkSimConfig cfg,
                             struct CkTrajectory **out_traj);

/**
 * Integrates the real phase model from `theta0`.
 *
 * # Safety
 * `omega` and `theta0` must hold `ck_network_size(net)` entries.
 */
enum CkStatus ck_run_real(const struct CkNetwork *net,
                          const double *omega,
                          double sigma,
                          const double *theta0,
                          struct CkSimConfig cfg,
                          struct CkPhaseTrajectory **out_traj);

/**
 * # Safety
 * `traj` must come from this library and not be freed twice. NULL is ignored.
 */
void ck_trajectory_free(struct CkTrajectory *traj);

/**
 * Number of recorded samples, or 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t ck_trajectory_len(const struct CkTrajectory *traj);

/**
 * Copies the sample times into `out_times` (`ck_trajectory_len` entries).
 *
 * # Safety
 * `out_times` must hold `ck_trajectory_len(traj)` entries.
 */
enum CkStatus ck_trajectory_times(const struct CkTrajectory *traj, double *out_times);

/**
 * Copies sample `index`: real and imaginary parts and unwrapped arguments.
 * Any output pointer may be NULL to skip it.
 *
 * # Safety
 * Non-NULL outputs must hold `n` entries.
 */
enum CkStatus ck_trajectory_sample(const struct CkTrajectory *traj,
                                   size_t index,
                                   double *out_re,
                                   double *out_im,
                                   double *out_args);

/**
 * Number of reset events (hybrid runs), or 0.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t ck_trajectory_reset_count(const struct CkTrajectory *traj);

/**
 * # Safety
 * `traj` must come from this library and not be freed twice. NULL is ignored.
 */
void ck_phase_trajectory_free(struct CkPhaseTrajectory *traj);

/**
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t ck_phase_trajectory_len(const struct CkPhaseTrajectory *traj);

/**
 * Copies the phases of sample `index` into `out_theta` (`n` entries).
 *
 * # Safety
 * `out_theta` must hold `n` entries.
 */
enum CkStatus ck_phase_trajectory_sample(const struct CkPhaseTrajectory *traj,
                                         size_t index,
                                         double *out_theta);

/**
 * Order parameter `(1/n) sum e^{i theta_k}`.
 *
 * # Safety
 * `phases` must hold `n` entries; outputs must be valid.
 */
enum CkStatus ck_order_parameter(const double *phases, size_t n, double *out_re, double *out_im);

/**
 * `(1/n) sum |a_k - b_k|`.
 *
 * # Safety
 * `a` and `b` must hold `n` entries; `out_e` must be valid.
 */
enum CkStatus ck_mean_abs_error(const double *a, const double *b, size_t n, double *out_e);

/**
 * Per-oscillator sufficient gains `omega_k + omega_bar + sigma (n - 1)`.
 *
 * # Safety
 * `omega` and `out_threshold` must hold `n` entries.
 */
enum CkStatus ck_gain_threshold(const double *omega,
                                size_t n,
                                double sigma,
                                double omega_bar,
                                double *out_threshold);

/**
 * Gain margin `min K - (max|omega| + omega_bar + sigma (n - 1))`. Returns
 * `CK_STATUS_OK` even when the margin is not positive; check the sign.
 *
 * # Safety
 * `gains` and `omega` must hold `n` entries; `out_margin` must be valid.
 */
enum CkStatus ck_gain_margin(const double *gains,
                             const double *omega,
                             size_t n,
                             double sigma,
                             double omega_bar,
                             double *out_margin);

/**
 * Runs a scenario file; the run summary is returned as JSON in `out_json`
 * (free with `ck_string_free`). Outputs are written when `outdir` is not NULL.
 *
 * # Safety
 * `path` and non-NULL `outdir` must be NUL-terminated; `out_json` must be valid.
 */
enum CkStatus ck_run_scenario_file(const char *path, const char *outdir, char **out_json);

/**
 * Runs a shipped preset (`fig1`, `fig2`, `fig3`, `fig3d`); see
 * [`ck_run_scenario_file`] for the outputs.
 *
 * # Safety
 * As for `ck_run_scenario_file`.
 */
enum CkStatus ck_run_preset(const char *name, const char *outdir, char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CKURAMOTO_H */
