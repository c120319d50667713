//! C interface over the simulator.
//!
//! The surface is a pair of opaque handles. A [`CsimConfig`] is built from
//! defaults and adjusted key by key; [`csim_run`] consumes a snapshot of it
//! and yields a [`CsimSeries`] holding per-step information measures
//! (ensemble mean and spread when more than one disorder sample is
//! requested). Every fallible call returns a [`CsimStatus`]; on failure a
//! thread-local message with detail is available through
//! [`csim_last_error_message`].
//!
//! Handles are not thread-safe; do not share one handle between threads
//! without external synchronization. Distinct handles are independent.
//!
//! The matching header, `include/collision_sim.h`, is generated with
//! cbindgen and committed; regenerate it after changing this file (see
//! `generate-header.sh`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use collision_sim::config::ExperimentConfig;
use collision_sim::ensemble::{ensemble, EnsembleStats};
use collision_sim::measures::InfoRecord;
use collision_sim::Error;

/// Result of a C-interface call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsimStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration was rejected; see the last error message.
    InvalidConfig = 3,
    /// The run produced a covariance matrix outside the physical domain.
    Unphysical = 4,
    /// A row, mode, or field argument was out of range.
    OutOfRange = 5,
    /// The run panicked or violated an internal invariant.
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn fail(error: &Error) -> CsimStatus {
    set_last_error(error.to_string());
    match error {
        Error::InvalidParameter(_) | Error::Config(_) | Error::Precondition(_) => {
            CsimStatus::InvalidConfig
        }
        Error::IndexOutOfRange { .. } | Error::DuplicateIndex(_) | Error::InvalidPartition(_) => {
            CsimStatus::OutOfRange
        }
        Error::Unphysical { .. } => CsimStatus::Unphysical,
        Error::NotUnitary { .. }
        | Error::ShapeMismatch(_)
        | Error::InvalidGrowth { .. }
        | Error::Io { .. } => CsimStatus::Internal,
    }
}

/// Opaque run configuration. Create with [`csim_config_new`], adjust with
/// [`csim_config_set`], release with [`csim_config_free`].
pub struct CsimConfig {
    inner: ExperimentConfig,
}

/// Opaque result table: one information-measure record per collision step,
/// starting at step 0. Release with [`csim_series_free`].
pub struct CsimSeries {
    stats: EnsembleStats,
}

/// Information measures stored per step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsimField {
    /// Mutual information between the system and the first memory mode.
    I2SM1 = 0,
    /// Mutual information between the system and the remaining memory modes.
    I2SM2 = 1,
    /// Mutual information between the system and the whole memory block.
    I2SM = 2,
    /// Tripartite information of system, memory, environment.
    I3 = 3,
}

fn field_value(record: &InfoRecord, field: CsimField) -> f64 {
    match field {
        CsimField::I2SM1 => record.i2_s_m1,
        CsimField::I2SM2 => record.i2_s_m2,
        CsimField::I2SM => record.i2_s_m,
        CsimField::I3 => record.i3,
    }
}

/// Version of the simulator library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn csim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread, or
/// null if no call has failed yet. The pointer stays valid until the next
/// failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn csim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |message| message.as_ptr())
    })
}

/// Allocate a configuration with the default parameters (entangled-pair
/// strength 1, near-reflective couplers, two memory modes, 100 steps,
/// vacuum inputs). Never fails; free with [`csim_config_free`].
#[no_mangle]
pub extern "C" fn csim_config_new() -> *mut CsimConfig {
    Box::into_raw(Box::new(CsimConfig {
        inner: ExperimentConfig::default(),
    }))
}

/// Set one configuration key from its text form, e.g. `("eta", "0.9")`,
/// `("steps", "200")`, `("pattern", "alternating:0.5")`,
/// `("env_disorder", "uniform:0:6.283185307179586")` or
/// `("per_mode_bmi", "true")`. Unknown keys and malformed values are
/// rejected with [`CsimStatus::InvalidConfig`] and leave the
/// configuration unchanged.
///
/// # Safety
///
/// `config` must be a live pointer from [`csim_config_new`]; `key` and
/// `value` must be NUL-terminated strings valid for the duration of the
/// call.
#[no_mangle]
pub unsafe extern "C" fn csim_config_set(
    config: *mut CsimConfig,
    key: *const c_char,
    value: *const c_char,
) -> CsimStatus {
    if config.is_null() || key.is_null() || value.is_null() {
        set_last_error("null pointer passed to csim_config_set".into());
        return CsimStatus::NullPointer;
    }
    let (key, value) = match (CStr::from_ptr(key).to_str(), CStr::from_ptr(value).to_str()) {
        (Ok(k), Ok(v)) => (k, v),
        _ => {
            set_last_error("csim_config_set arguments must be UTF-8".into());
            return CsimStatus::InvalidUtf8;
        }
    };
    let config = &mut *config;
    let mut candidate = config.inner.clone();
    match candidate.apply_override(key, value) {
        Ok(()) => {
            config.inner = candidate;
            CsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release a configuration. Passing null is a no-op.
///
/// # Safety
///
/// `config` must be null or a pointer from [`csim_config_new`] that has
/// not been freed before.
#[no_mangle]
pub unsafe extern "C" fn csim_config_free(config: *mut CsimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the collision model and return the information-measure series.
///
/// `n_samples` is the number of disorder samples averaged into the
/// result; 1 runs the configuration once. The configuration is
/// snapshotted, so it can be modified or freed afterwards independently
/// of the returned series. On success `*out` owns the series; on failure
/// `*out` is set to null and the status tells why.
///
/// # Safety
///
/// `config` must be a live pointer from [`csim_config_new`] and `out`
/// must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn csim_run(
    config: *const CsimConfig,
    n_samples: usize,
    out: *mut *mut CsimSeries,
) -> CsimStatus {
    if out.is_null() {
        set_last_error("null output pointer passed to csim_run".into());
        return CsimStatus::NullPointer;
    }
    *out = ptr::null_mut();
    if config.is_null() {
        set_last_error("null config passed to csim_run".into());
        return CsimStatus::NullPointer;
    }
    let snapshot = (*config).inner.clone();
    if let Err(e) = snapshot.validate() {
        return fail(&e);
    }
    let outcome = catch_unwind(AssertUnwindSafe(|| ensemble(&snapshot, n_samples)));
    match outcome {
        Ok(Ok(stats)) => {
            *out = Box::into_raw(Box::new(CsimSeries { stats }));
            CsimStatus::Ok
        }
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_last_error("simulation panicked; this is a bug in the library".into());
            CsimStatus::Internal
        }
    }
}

/// Release a series. Passing null is a no-op.
///
/// # Safety
///
/// `series` must be null or a pointer from [`csim_run`] that has not been
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn csim_series_free(series: *mut CsimSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of records in the series: collision steps plus one, row `i`
/// holding the state after step `i`. Returns 0 for null.
///
/// # Safety
///
/// `series` must be null or a live pointer from [`csim_run`].
#[no_mangle]
pub unsafe extern "C" fn csim_series_len(series: *const CsimSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).stats.mean.records.len()
}

/// Number of memory modes in the run the series came from. Returns 0 for
/// null.
///
/// # Safety
///
/// `series` must be null or a live pointer from [`csim_run`].
#[no_mangle]
pub unsafe extern "C" fn csim_series_n_memory(series: *const CsimSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).stats.mean.n_memory
}

/// Number of disorder samples averaged into the series. Returns 0 for
/// null.
///
/// # Safety
///
/// `series` must be null or a live pointer from [`csim_run`].
#[no_mangle]
pub unsafe extern "C" fn csim_series_n_samples(series: *const CsimSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).stats.n_samples
}

/// Whether the series carries per-memory-mode values (the
/// `per_mode_bmi` configuration key). Returns false for null.
///
/// # Safety
///
/// `series` must be null or a live pointer from [`csim_run`].
#[no_mangle]
pub unsafe extern "C" fn csim_series_has_mode_values(series: *const CsimSeries) -> bool {
    if series.is_null() {
        return false;
    }
    (*series)
        .stats
        .mean
        .records
        .first()
        .is_some_and(|r| r.per_mode.is_some())
}

unsafe fn record_at(
    series: *const CsimSeries,
    row: usize,
    std: bool,
) -> Result<*const InfoRecord, CsimStatus> {
    if series.is_null() {
        set_last_error("null series handle".into());
        return Err(CsimStatus::NullPointer);
    }
    let table = if std {
        &(*series).stats.std
    } else {
        &(*series).stats.mean
    };
    match table.records.get(row) {
        Some(record) => Ok(record),
        None => {
            set_last_error(format!(
                "row {row} out of range for a series of {} records",
                table.records.len()
            ));
            Err(CsimStatus::OutOfRange)
        }
    }
}

/// Read the ensemble mean of one field at one row into `*out`.
///
/// # Safety
///
/// `series` must be a live pointer from [`csim_run`] and `out` must point
/// to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn csim_series_value(
    series: *const CsimSeries,
    row: usize,
    field: CsimField,
    out: *mut f64,
) -> CsimStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return CsimStatus::NullPointer;
    }
    match record_at(series, row, false) {
        Ok(record) => {
            *out = field_value(&*record, field);
            CsimStatus::Ok
        }
        Err(status) => status,
    }
}

/// Read the ensemble spread (sample standard deviation) of one field at
/// one row into `*out`. Zero when the series came from a single sample.
///
/// # Safety
///
/// `series` must be a live pointer from [`csim_run`] and `out` must point
/// to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn csim_series_std(
    series: *const CsimSeries,
    row: usize,
    field: CsimField,
    out: *mut f64,
) -> CsimStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return CsimStatus::NullPointer;
    }
    match record_at(series, row, true) {
        Ok(record) => {
            *out = field_value(&*record, field);
            CsimStatus::Ok
        }
        Err(status) => status,
    }
}

unsafe fn mode_value_at(
    series: *const CsimSeries,
    row: usize,
    mode: usize,
    std: bool,
    out: *mut f64,
) -> CsimStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return CsimStatus::NullPointer;
    }
    let record = match record_at(series, row, std) {
        Ok(record) => &*record,
        Err(status) => return status,
    };
    let Some(per_mode) = record.per_mode.as_ref() else {
        set_last_error(
            "series has no per-mode values; set per_mode_bmi=true before running".into(),
        );
        return CsimStatus::OutOfRange;
    };
    match per_mode.get(mode) {
        Some(v) => {
            *out = *v;
            CsimStatus::Ok
        }
        None => {
            set_last_error(format!(
                "mode {mode} out of range for {} memory modes",
                per_mode.len()
            ));
            CsimStatus::OutOfRange
        }
    }
}

/// Read the ensemble mean of the system correlation with one memory mode
/// (mode 0 is the memory mode the system couples to directly). Requires
/// `per_mode_bmi=true` in the configuration.
///
/// # Safety
///
/// `series` must be a live pointer from [`csim_run`] and `out` must point
/// to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn csim_series_mode_value(
    series: *const CsimSeries,
    row: usize,
    mode: usize,
    out: *mut f64,
) -> CsimStatus {
    mode_value_at(series, row, mode, false, out)
}

/// Read the ensemble spread of the system correlation with one memory
/// mode. Requires `per_mode_bmi=true` in the configuration.
///
/// # Safety
///
/// `series` must be a live pointer from [`csim_run`] and `out` must point
/// to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn csim_series_mode_std(
    series: *const CsimSeries,
    row: usize,
    mode: usize,
    out: *mut f64,
) -> CsimStatus {
    mode_value_at(series, row, mode, true, out)
}
