#ifndef COLLISION_SIM_H
#define COLLISION_SIM_H

/* Generated by cbindgen from the collision-sim-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Information measures stored per step.
typedef enum CsimField {
  // Mutual information between the system and the first memory mode.
  CSIM_FIELD_I2SM1 = 0,
  // Mutual information between the system and the remaining memory modes.
  CSIM_FIELD_I2SM2 = 1,
  // Mutual information between the system and the whole memory block.
  CSIM_FIELD_I2SM = 2,
  // Tripartite information of system, memory, environment.
  CSIM_FIELD_I3 = 3,
} CsimField;

// Result of a C-interface call.
typedef enum CsimStatus {
  // The call succeeded.
  CSIM_STATUS_OK = 0,
  // A required pointer argument was null.
  CSIM_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CSIM_STATUS_INVALID_UTF8 = 2,
  // The configuration was rejected; see the last error message.
  CSIM_STATUS_INVALID_CONFIG = 3,
  // The run produced a covariance matrix outside the physical domain.
  CSIM_STATUS_UNPHYSICAL = 4,
  // A row, mode, or field argument was out of range.
  CSIM_STATUS_OUT_OF_RANGE = 5,
  // The run panicked or violated an internal invariant.
  CSIM_STATUS_INTERNAL = 6,
} CsimStatus;

// Opaque run configuration. Create with [`csim_config_new`], adjust with
// [`csim_config_set`], release with [`csim_config_free`].
typedef struct CsimConfig CsimConfig;

// Opaque result table: one information-measure record per collision step,
// starting at step 0. Release with [`csim_series_free`].
typedef struct CsimSeries CsimSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the simulator library as a static NUL-terminated string.
const char *csim_version(void);

// Message describing the most recent failure on the calling thread, or
// null if no call has failed yet. The pointer stays valid until the next
// failing call on the same thread; do not free it.
const char *csim_last_error_message(void);

// Allocate a configuration with the default parameters (entangled-pair
// strength 1, near-reflective couplers, two memory modes, 100 steps,
// vacuum inputs). Never fails; free with [`csim_config_free`].
struct CsimConfig *csim_config_new(void);

// Set one configuration key from its text form, e.g. `("eta", "0.9")`,
// `("steps", "200")`, `("pattern", "alternating:0.5")`,
// `("env_disorder", "uniform:0:6.283185307179586")` or
// `("per_mode_bmi", "true")`. Unknown keys and malformed values are
// rejected with [`CsimStatus::InvalidConfig`] and leave the
// configuration unchanged.
//
// # Safety
//
// `config` must be a live pointer from [`csim_config_new`]; `key` and
// `value` must be NUL-terminated strings valid for the duration of the
// call.
enum CsimStatus csim_config_set(struct CsimConfig *config, const char *key, const char *value);

// Release a configuration. Passing null is a no-op.
//
// # Safety
//
// `config` must be null or a pointer from [`csim_config_new`] that has
// not been freed before.
void csim_config_free(struct CsimConfig *config);

// Run the collision model and return the information-measure series.
//
// `n_samples` is the number of disorder samples averaged into the
// result; 1 runs the configuration once. The configuration is
// snapshotted, so it can be modified or freed afterwards independently
// of the returned series. On success `*out` owns the series; on failure
// `*out` is set to null and the status tells why.
//
// # Safety
//
// `config` must be a live pointer from [`csim_config_new`] and `out`
// must point to writable storage for one pointer.
enum CsimStatus csim_run(const struct CsimConfig *config,
                         size_t n_samples,
                         struct CsimSeries **out);

// Release a series. Passing null is a no-op.
//
// # Safety
//
// `series` must be null or a pointer from [`csim_run`] that has not been
// freed before.
void csim_series_free(struct CsimSeries *series);

// Number of records in the series: collision steps plus one, row `i`
// holding the state after step `i`. Returns 0 for null.
//
// # Safety
//
// `series` must be null or a live pointer from [`csim_run`].
size_t csim_series_len(const struct CsimSeries *series);

// Number of memory modes in the run the series came from. Returns 0 for
// null.
//
// # Safety
//
// `series` must be null or a live pointer from [`csim_run`].
size_t csim_series_n_memory(const struct CsimSeries *series);

// Number of disorder samples averaged into the series. Returns 0 for
// null.
//
// # Safety
//
// `series` must be null or a live pointer from [`csim_run`].
size_t csim_series_n_samples(const struct CsimSeries *series);

// Whether the series carries per-memory-mode values (the
// `per_mode_bmi` configuration key). Returns false for null.
//
// # Safety
//
// `series` must be null or a live pointer from [`csim_run`].
bool csim_series_has_mode_values(const struct CsimSeries *series);

// Read the ensemble mean of one field at one row into `*out`.
//
// # Safety
//
// `series` must be a live pointer from [`csim_run`] and `out` must point
// to writable storage for one double.
enum CsimStatus csim_series_value(const struct CsimSeries *series,
                                  size_t row,
                                  enum CsimField field,
                                  double *out);

// Read the ensemble spread (sample standard deviation) of one field at
// one row into `*out`. Zero when the series came from a single sample.
//
// # Safety
//
// `series` must be a live pointer from [`csim_run`] and `out` must point
// to writable storage for one double.
enum CsimStatus csim_series_std(const struct CsimSeries *series,
                                size_t row,
                                enum CsimField field,
                                double *out);

// Read the ensemble mean of the system correlation with one memory mode
// (mode 0 is the memory mode the system couples to directly). Requires
// `per_mode_bmi=true` in the configuration.
//
// # Safety
//
// `series` must be a live pointer from [`csim_run`] and `out` must point
// to writable storage for one double.
enum CsimStatus csim_series_mode_value(const struct CsimSeries *series,
                                       size_t row,
                                       size_t mode,
                                       double *out);

// Read the ensemble spread of the system correlation with one memory
// mode. Requires `per_mode_bmi=true` in the configuration.
//
// # Safety
//
// `series` must be a live pointer from [`csim_run`] and `out` must point
// to writable storage for one double.
enum CsimStatus csim_series_mode_std(const struct CsimSeries *series,
                                     size_t row,
                                     size_t mode,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COLLISION_SIM_H */
