#ifndef SWE_FFI_H
#define SWE_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Nodal field selector for [`swe_simulation_copy_field`].
typedef enum SweField {
  SWE_FIELD_ETA = 0,
  SWE_FIELD_PHI = 1,
  SWE_FIELD_U1 = 2,
  SWE_FIELD_U2 = 3,
} SweField;

// Result of every fallible call. Values 0 to 3 match the `swe` exit codes.
typedef enum SweStatus {
  SWE_STATUS_OK = 0,
  SWE_STATUS_CONFIG_ERROR = 1,
  SWE_STATUS_RUNTIME_ERROR = 2,
  SWE_STATUS_THEOREM_VIOLATED = 3,
  SWE_STATUS_NULL_POINTER = 4,
  SWE_STATUS_INVALID_ARGUMENT = 5,
  SWE_STATUS_PANIC = 6,
} SweStatus;

// Opaque simulation handle.
typedef struct SweSimulation SweSimulation;

typedef struct SweEnergyRecord {
  size_t step;
  double time;
  double energy;
  double i1;
  double i2;
  double i3;
  double i4;
  double sum;
} SweEnergyRecord;

typedef struct SweTheorem2Report {
  size_t step;
  double alpha;
  double c0_bound;
  bool eta_floor_ok;
  bool phi_positive_ok;
  bool c0_ok;
  double i12_sum;
  double i2_transmission;
  bool conclusion_holds;
} SweTheorem2Report;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a simulation at its initial state from configuration text.
//
// # Safety
// `config` must be a valid NUL-terminated string and `out` a valid pointer.
enum SweStatus swe_simulation_new(const char *config, struct SweSimulation **out);

// Release a simulation. Null is ignored.
//
// # Safety
// `sim` must come from [`swe_simulation_new`] and not be used afterwards.
void swe_simulation_free(struct SweSimulation *sim);

// Advance by `steps` time steps. After a solver failure every later call
// returns `RuntimeError`.
//
// # Safety
// `sim` must be a live handle.
enum SweStatus swe_simulation_advance(struct SweSimulation *sim, size_t steps);

// Advance to the configured final step.
//
// # Safety
// `sim` must be a live handle.
enum SweStatus swe_simulation_run_to_end(struct SweSimulation *sim);

// Current time index, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t swe_simulation_step(const struct SweSimulation *sim);

// Configured number of steps, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t swe_simulation_total_steps(const struct SweSimulation *sim);

// Current simulated time, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
double swe_simulation_time(const struct SweSimulation *sim);

// Nodes per side, `N + 1`; fields hold its square. 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t swe_simulation_nodes_per_side(const struct SweSimulation *sim);

// Energy and boundary/dissipation integrals at the current step.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum SweStatus swe_simulation_energy(const struct SweSimulation *sim, struct SweEnergyRecord *out);

// Copy one nodal field into `buf`, row by row with `i` fastest.
// `len` must be at least the square of [`swe_simulation_nodes_per_side`].
//
// # Safety
// `sim` must be a live handle and `buf` valid for `len` writes.
enum SweStatus swe_simulation_copy_field(const struct SweSimulation *sim,
                                         enum SweField field,
                                         double *buf,
                                         size_t len);

// Evaluate the transmission-boundary sign estimate at the current step.
// Returns `TheoremViolated` when its conditions hold but the flux sum
// exceeds `tolerance`; `out` is filled in either case.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum SweStatus swe_simulation_check_theorem2(const struct SweSimulation *sim,
                                             double alpha,
                                             double tolerance,
                                             struct SweTheorem2Report *out);

// Elevation norm `h * sqrt(sum eta^2)` over all nodes.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum SweStatus swe_simulation_s_norm(const struct SweSimulation *sim, double *out);

// Message for the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call into this library.
const char *swe_last_error_message(void);

// Library version as a static string.
const char *swe_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWE_FFI_H */
