//! C interface to the feeder matching engine.
//!
//! Instances and reports are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`FeederStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`feeder_last_error`]. Strings returned to the caller are released with
//! [`feeder_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use feeder::clustering::ClusterConfig;
use feeder::gen::{gen_interval_instance, GenConfig};
use feeder::model::Instance;
use feeder::pipeline::{Algo, PipelineError, SolveOptions};
use feeder::report::{run_pipeline, MetricsReport};
use feeder::Problem;

/// Result codes; the non-zero values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeederStatus {
    Ok = 0,
    Internal = 1,
    Infeasible = 2,
    Config = 3,
    Io = 4,
    NullArgument = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeederProblem {
    MinDist = 0,
    MinNum = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeederAlgo {
    Exact = 0,
    Greedy = 1,
    LocalSearch = 2,
}

/// One interval of drivers and riders.
pub struct FeederInstance(Instance);

/// Metrics of a solved interval.
pub struct FeederReport(MetricsReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: FeederStatus, msg: impl Into<String>) -> FeederStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`FeederStatus::Internal`].
fn guard(f: impl FnOnce() -> FeederStatus) -> FeederStatus {
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(FeederStatus::Internal, "internal error"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, FeederStatus> {
    if p.is_null() {
        return Err(fail(FeederStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FeederStatus::Config, "string argument is not UTF-8"))
}

fn pipeline_status(e: &PipelineError) -> FeederStatus {
    match e {
        PipelineError::Infeasible { .. } => FeederStatus::Infeasible,
        PipelineError::Config(_) | PipelineError::Cluster(_) => FeederStatus::Config,
        PipelineError::Validation(_) => FeederStatus::Internal,
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn feeder_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feeder_instance_from_json(
    json: *const c_char,
    out: *mut *mut FeederInstance,
) -> FeederStatus {
    guard(|| {
        if out.is_null() {
            return fail(FeederStatus::NullArgument, "null output pointer");
        }
        let s = match text(json) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match Instance::from_json(s) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(FeederInstance(inst)));
                FeederStatus::Ok
            }
            Err(e) => fail(FeederStatus::Config, e.to_string()),
        }
    })
}

/// Generates an instance with the default generator settings, `riders`
/// riders and the interval starting at `start` seconds.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feeder_instance_generate(
    seed: u64,
    riders: u32,
    start: i64,
    out: *mut *mut FeederInstance,
) -> FeederStatus {
    guard(|| {
        if out.is_null() {
            return fail(FeederStatus::NullArgument, "null output pointer");
        }
        let cfg = GenConfig {
            seed,
            riders,
            ..GenConfig::default()
        };
        match gen_interval_instance(&cfg, start) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(FeederInstance(inst)));
                FeederStatus::Ok
            }
            Err(e) => fail(FeederStatus::Config, e.to_string()),
        }
    })
}

/// Number of riders of an instance; 0 for null.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn feeder_instance_riders(inst: *const FeederInstance) -> u32 {
    inst.as_ref().map_or(0, |i| i.0.riders.len() as u32)
}

/// Instance as JSON; release with [`feeder_string_free`].
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feeder_instance_to_json(
    inst: *const FeederInstance,
    out: *mut *mut c_char,
) -> FeederStatus {
    guard(|| match (inst.as_ref(), out.is_null()) {
        (Some(i), false) => string_out(i.0.to_json(), out),
        _ => fail(FeederStatus::NullArgument, "null argument"),
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn feeder_instance_free(inst: *mut FeederInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Solves one interval. `time_limit_s <= 0` means no limit; `clustered`
/// solves each cluster of the default clustering separately.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feeder_solve(
    inst: *const FeederInstance,
    problem: FeederProblem,
    algo: FeederAlgo,
    clustered: bool,
    time_limit_s: f64,
    out: *mut *mut FeederReport,
) -> FeederStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(FeederStatus::NullArgument, "null instance");
        };
        if out.is_null() {
            return fail(FeederStatus::NullArgument, "null output pointer");
        }
        let problem = match problem {
            FeederProblem::MinDist => Problem::MinDist,
            FeederProblem::MinNum => Problem::MinNum,
        };
        let algo = match algo {
            FeederAlgo::Exact => Algo::Exact,
            FeederAlgo::Greedy => Algo::Greedy,
            FeederAlgo::LocalSearch => Algo::Ls,
        };
        let mut opts = SolveOptions::new(problem, algo);
        if time_limit_s > 0.0 && time_limit_s.is_finite() {
            opts.time_limit = Some(Duration::from_secs_f64(time_limit_s));
        }
        let cfg = ClusterConfig::default();
        let label = inst.0.interval.0.to_string();
        match run_pipeline(&[(label, inst.0.clone())], &opts, clustered.then_some(&cfg)) {
            Ok(rep) => {
                *out = Box::into_raw(Box::new(FeederReport(rep)));
                FeederStatus::Ok
            }
            Err(e) => fail(pipeline_status(&e), e.to_string()),
        }
    })
}

/// Objective value of a solved interval; 0 for null.
///
/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn feeder_report_objective(rep: *const FeederReport) -> u64 {
    rep.as_ref().map_or(0, |r| r.0.aggregate.objective)
}

/// Number of drivers assigned; 0 for null.
///
/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn feeder_report_assigned(rep: *const FeederReport) -> u64 {
    rep.as_ref().map_or(0, |r| r.0.aggregate.assigned_total as u64)
}

/// Report as CSV, timings zeroed when `zero_timings` is set; release with
/// [`feeder_string_free`].
///
/// # Safety
/// `rep` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feeder_report_csv(
    rep: *const FeederReport,
    zero_timings: bool,
    out: *mut *mut c_char,
) -> FeederStatus {
    guard(|| {
        let Some(rep) = rep.as_ref() else {
            return fail(FeederStatus::NullArgument, "null report");
        };
        if out.is_null() {
            return fail(FeederStatus::NullArgument, "null output pointer");
        }
        let mut r = rep.0.clone();
        if zero_timings {
            r.zero_timings();
        }
        string_out(r.to_csv(), out)
    })
}

/// # Safety
/// `rep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn feeder_report_free(rep: *mut FeederReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

unsafe fn string_out(s: String, out: *mut *mut c_char) -> FeederStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FeederStatus::Ok
        }
        Err(_) => fail(FeederStatus::Internal, "output contains a NUL byte"),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn feeder_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
