//! C ABI for the `ris-isac` simulator and optimizer.
//!
//! Scenarios and optimization results are opaque handles created and freed
//! through this API. Every fallible function returns a [`RisStatus`]; on
//! failure a description is available from [`ris_last_error`] on the same
//! thread. Panics never cross the boundary and surface as
//! `RIS_STATUS_PANIC`.
//!
//! Strings returned by the library must be released with
//! [`ris_string_free`]. The header `include/ris_isac.h` is generated from
//! this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ris_isac::cli::ResultDocument;
use ris_isac::optimizer::EvaluatedCandidate;
use ris_isac::{
    evaluate_candidate, iterative_search, load_config, sweep_grid, Error, FixedParams, MetricBundle, MetricKind,
    Point2D, RisConfig, ScenarioConfig, SearchParams,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Geometry = 5,
    InvalidInput = 6,
    Integrity = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Grid metric selector for [`ris_sweep`], passed as `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisMetric {
    DeltaSnrB = 0,
    SensingGain = 1,
    SecurityGap = 2,
    ScalarObjective = 3,
}

/// Representative selector for [`ris_result_representative`], passed as
/// `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisRepresentative {
    BestSnrB = 0,
    BestSecurityGap = 1,
    BestSensingGain = 2,
    Balanced = 3,
}

/// A RIS deployment: position in meters, orientation in radians, element
/// count and ISAC weight in [0, 1].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisCandidate {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub num_elements: u32,
    pub alpha: f64,
}

/// Frame-averaged metrics of one candidate, all in dB.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisMetrics {
    pub snr_b_db: f64,
    pub snr_e_db: f64,
    pub snr_t_total_db: f64,
    pub snr_t_direct_db: f64,
    pub delta_snr_b_db: f64,
    pub security_gap_db: f64,
    pub sensing_gain_db: f64,
}

/// Opaque scenario handle.
pub struct RisScenario {
    cfg: ScenarioConfig,
}

/// Opaque optimization result handle.
pub struct RisResult {
    doc: ResultDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(RisStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => RisStatus::Parse,
            Error::Validation { .. } => RisStatus::Validation,
            Error::CoincidentPoints { .. } => RisStatus::Geometry,
            Error::InvalidInput(_) => RisStatus::InvalidInput,
            Error::Integrity(_) => RisStatus::Integrity,
            Error::Io { .. } => RisStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RisStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RisStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            RisStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RisStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RisStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn new_scenario(out: *mut *mut RisScenario, cfg: ScenarioConfig) -> Result<(), Failure> {
    let handle = Box::into_raw(Box::new(RisScenario { cfg }));
    write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
}

fn metrics_to_c(m: &MetricBundle) -> RisMetrics {
    RisMetrics {
        snr_b_db: m.snr_b_db,
        snr_e_db: m.snr_e_db,
        snr_t_total_db: m.snr_t_total_db,
        snr_t_direct_db: m.snr_t_direct_db,
        delta_snr_b_db: m.delta_snr_b_db,
        security_gap_db: m.security_gap_db,
        sensing_gain_db: m.sensing_gain_db,
    }
}

fn candidate_to_c(r: &RisConfig) -> RisCandidate {
    RisCandidate {
        x: r.position.x,
        y: r.position.y,
        theta: r.orientation,
        num_elements: r.num_elements,
        alpha: r.alpha,
    }
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn ris_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ris_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a scenario with every parameter at its default.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_default(out: *mut *mut RisScenario) -> RisStatus {
    guard(|| new_scenario(out, ScenarioConfig::default()))
}

/// Parses and validates a scenario from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` as for
/// [`ris_scenario_default`].
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_from_json(json: *const c_char, out: *mut *mut RisScenario) -> RisStatus {
    guard(|| {
        let cfg = ScenarioConfig::from_json_str(str_arg(json, "json")?)?;
        new_scenario(out, cfg)
    })
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as for
/// [`ris_scenario_default`].
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_load(path: *const c_char, out: *mut *mut RisScenario) -> RisStatus {
    guard(|| {
        let cfg = load_config(str_arg(path, "path")?)?;
        new_scenario(out, cfg)
    })
}

/// Replaces the master seed of a scenario.
///
/// # Safety
/// `scenario` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_set_seed(scenario: *mut RisScenario, seed: u64) -> RisStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        s.cfg.master_seed = seed;
        Ok(())
    })
}

/// Serializes a scenario to JSON. Release the string with
/// [`ris_string_free`].
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_to_json(scenario: *const RisScenario, out: *mut *mut c_char) -> RisStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let text = CString::new(s.cfg.to_json_string()).expect("JSON has no NUL bytes");
        write_out(out, text.into_raw(), "out")
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_scenario_free(scenario: *mut RisScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Evaluates one candidate with the default substream layout.
///
/// # Safety
/// `scenario` must be a live handle; `candidate` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ris_evaluate(
    scenario: *const RisScenario,
    candidate: *const RisCandidate,
    out: *mut RisMetrics,
) -> RisStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let c = ref_arg(candidate, "candidate")?;
        let ris = RisConfig::new(Point2D::new(c.x, c.y), c.theta, c.num_elements, c.alpha);
        let m = evaluate_candidate(&s.cfg, &ris, ris_isac::metrics::candidate_key(&ris))?;
        write_out(out, metrics_to_c(&m), "out")
    })
}

/// Sweeps one metric over the deployment area.
///
/// `rows` and `cols` are always written on success or on
/// `RIS_STATUS_BUFFER_TOO_SMALL`. Values are row-major with rows along
/// increasing y. Pass `values = NULL` to query the dimensions only.
///
/// # Safety
/// `scenario` must be a live handle; `values` must be null or hold
/// `capacity` doubles; `rows` and `cols` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ris_sweep(
    scenario: *const RisScenario,
    theta: f64,
    num_elements: u32,
    alpha: f64,
    cell_size: f64,
    metric: u32,
    values: *mut f64,
    capacity: usize,
    rows: *mut usize,
    cols: *mut usize,
) -> RisStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("rows/cols"));
        }
        let kind = match metric {
            m if m == RisMetric::DeltaSnrB as u32 => MetricKind::DeltaSnrB,
            m if m == RisMetric::SensingGain as u32 => MetricKind::SensingGain,
            m if m == RisMetric::SecurityGap as u32 => MetricKind::SecurityGap,
            m if m == RisMetric::ScalarObjective as u32 => MetricKind::ScalarObjective,
            m => return Err(Failure(RisStatus::InvalidInput, format!("unknown metric {m}"))),
        };
        let fixed = FixedParams {
            theta,
            num_elements,
            alpha,
        };
        let grid = sweep_grid(&s.cfg, fixed, cell_size, &[kind])?.remove(0);
        rows.write(grid.rows);
        cols.write(grid.cols);
        if values.is_null() || capacity < grid.values.len() {
            return Err(Failure(
                RisStatus::BufferTooSmall,
                format!("sweep needs {} values, buffer holds {capacity}", grid.values.len()),
            ));
        }
        ptr::copy_nonoverlapping(grid.values.as_ptr(), values, grid.values.len());
        Ok(())
    })
}

/// Runs the coarse-to-fine search. `search_params_json` may be null for the
/// defaults; omitted fields take their defaults.
///
/// # Safety
/// `scenario` must be a live handle; `search_params_json` null or a
/// NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ris_optimize(
    scenario: *const RisScenario,
    search_params_json: *const c_char,
    out: *mut *mut RisResult,
) -> RisStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let params = if search_params_json.is_null() {
            SearchParams::default()
        } else {
            SearchParams::from_json_str(str_arg(search_params_json, "search_params_json")?)?
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let result = iterative_search(&s.cfg, &params)?;
        let handle = Box::new(RisResult {
            doc: ResultDocument::new(&s.cfg, &params, result),
        });
        out.write(Box::into_raw(handle));
        Ok(())
    })
}

/// Loads a saved result and checks its integrity.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ris_result_load(path: *const c_char, out: *mut *mut RisResult) -> RisStatus {
    guard(|| {
        let doc = ResultDocument::load(str_arg(path, "path")?)?;
        doc.validate()?;
        let handle = Box::into_raw(Box::new(RisResult { doc }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Number of evaluated candidates in a result, or 0 for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ris_result_len(result: *const RisResult) -> usize {
    result.as_ref().map_or(0, |r| r.doc.candidates.len())
}

/// Number of search rounds executed, or 0 for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ris_result_rounds(result: *const RisResult) -> usize {
    result.as_ref().map_or(0, |r| r.doc.rounds_executed)
}

fn write_candidate(
    c: &EvaluatedCandidate,
    candidate: *mut RisCandidate,
    metrics: *mut RisMetrics,
) -> Result<(), Failure> {
    // SAFETY: callers pass pointers the public functions document as valid.
    unsafe {
        write_out(candidate, candidate_to_c(&c.ris), "candidate")?;
        write_out(metrics, metrics_to_c(&c.metrics), "metrics")
    }
}

/// Copies one representative solution.
///
/// # Safety
/// `result` must be a live handle; `candidate` and `metrics` valid.
#[no_mangle]
pub unsafe extern "C" fn ris_result_representative(
    result: *const RisResult,
    which: u32,
    candidate: *mut RisCandidate,
    metrics: *mut RisMetrics,
) -> RisStatus {
    guard(|| {
        let reps = &ref_arg(result, "result")?.doc.representatives;
        let c = match which {
            w if w == RisRepresentative::BestSnrB as u32 => &reps.best_snr_b,
            w if w == RisRepresentative::BestSecurityGap as u32 => &reps.best_security_gap,
            w if w == RisRepresentative::BestSensingGain as u32 => &reps.best_sensing_gain,
            w if w == RisRepresentative::Balanced as u32 => &reps.balanced,
            w => return Err(Failure(RisStatus::InvalidInput, format!("unknown representative {w}"))),
        };
        write_candidate(c, candidate, metrics)
    })
}

/// Copies the evaluated candidate at `index`.
///
/// # Safety
/// `result` must be a live handle; `candidate` and `metrics` valid.
#[no_mangle]
pub unsafe extern "C" fn ris_result_candidate(
    result: *const RisResult,
    index: usize,
    candidate: *mut RisCandidate,
    metrics: *mut RisMetrics,
) -> RisStatus {
    guard(|| {
        let doc = &ref_arg(result, "result")?.doc;
        let c = doc.candidates.get(index).ok_or_else(|| {
            Failure(
                RisStatus::InvalidInput,
                format!("index {index} out of range for {} candidates", doc.candidates.len()),
            )
        })?;
        write_candidate(c, candidate, metrics)
    })
}

/// Serializes a result in the same JSON format the CLI writes. Release the
/// string with [`ris_string_free`].
///
/// # Safety
/// `result` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ris_result_to_json(result: *const RisResult, out: *mut *mut c_char) -> RisStatus {
    guard(|| {
        let r = ref_arg(result, "result")?;
        let text = CString::new(r.doc.to_json_string()).expect("JSON has no NUL bytes");
        write_out(out, text.into_raw(), "out")
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_result_free(result: *mut RisResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
