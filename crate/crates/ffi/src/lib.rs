//! C ABI over the chart oracles and the descent engine.
//!
//! Every entry point returns a [`TrcalcStatus`] and never unwinds into the
//! caller. On failure a message is kept per thread and can be read with
//! [`trcalc_last_error`] until the next call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trcalc::cli::{compute, ChartFile, CliError, JobSpec, Target};
use trcalc::reps::{smash_homotopy, Rep};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrcalcStatus {
    Ok = 0,
    /// The job ran but a verification check failed.
    Fail = 1,
    /// Invalid arguments.
    Usage = 2,
    NullPointer = 3,
    Panic = 4,
}

/// Values accepted for the `target` argument of [`trcalc_chart_compute`].
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrcalcTarget {
    Tr = 0,
    Filtration = 1,
    Gr = 2,
    Mackey = 3,
    E3alg = 4,
}

/// Opaque handle to a computed chart.
pub struct TrcalcChart {
    file: ChartFile,
    pass: bool,
}

/// Borrowed view of one cell. The pointers stay valid until the chart is freed.
#[repr(C)]
pub struct TrcalcCell {
    pub deg: *const u64,
    pub deg_len: usize,
    pub dim: i64,
    /// Exponents e_i of ⊕ Z/p^{e_i}, ascending.
    pub exps: *const u32,
    pub exps_len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<TrcalcStatus, (TrcalcStatus, String)>) -> TrcalcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TrcalcStatus::Panic
        }
    }
}

fn from_cli(e: CliError) -> (TrcalcStatus, String) {
    let status = if e.exit_code() == trcalc::cli::EXIT_USAGE { TrcalcStatus::Usage } else { TrcalcStatus::Fail };
    (status, e.to_string())
}

fn null(name: &str) -> (TrcalcStatus, String) {
    (TrcalcStatus::NullPointer, format!("{name} is null"))
}

fn usage(msg: impl Into<String>) -> (TrcalcStatus, String) {
    (TrcalcStatus::Usage, msg.into())
}

fn run_job(spec: JobSpec, out: *mut *mut TrcalcChart) -> Result<TrcalcChart, (TrcalcStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let outcome = compute(&spec).map_err(from_cli)?;
    Ok(TrcalcChart { file: outcome.file, pass: outcome.pass })
}

/// Computes a closed-form chart over all multidegrees of `vars` variables with
/// total weight at most `max_weight` and dimensions `0..=max_dim`. `i` is the
/// filtration index for the filtration and graded targets and is ignored
/// otherwise. On success `*out` owns a chart to release with
/// [`trcalc_chart_free`].
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn trcalc_chart_compute(
    target: u32,
    p: u64,
    r: u32,
    vars: usize,
    max_weight: u64,
    max_dim: i64,
    i: u32,
    out: *mut *mut TrcalcChart,
) -> TrcalcStatus {
    guard(|| {
        let target = match target {
            0 => Target::Tr,
            1 => Target::Filtration,
            2 => Target::Gr,
            3 => Target::Mackey,
            4 => Target::E3alg,
            t => return Err(usage(format!("unknown target {t}"))),
        };
        let spec =
            JobSpec { target, p, r, vars, max_weight, max_dim, i, deg: None, kmax: None, denom: None, full: false };
        let chart = run_job(spec, out)?;
        *out = Box::into_raw(Box::new(chart));
        Ok(TrcalcStatus::Ok)
    })
}

/// Computes the E_2 page for the multidegree `deg[0..deg_len]` and compares
/// it with the closed forms through filtration `i`. Returns `Ok` when every
/// cell agrees and `Fail` otherwise; in both cases `*out` receives the page.
/// `kmax` and `denom` of 0 select the defaults.
///
/// # Safety
/// `deg` must point to `deg_len` readable values; `out` must be null or
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn trcalc_descent_verify(
    p: u64,
    r: u32,
    deg: *const u64,
    deg_len: usize,
    max_dim: i64,
    i: u32,
    kmax: usize,
    denom: u32,
    out: *mut *mut TrcalcChart,
) -> TrcalcStatus {
    guard(|| {
        if deg.is_null() {
            return Err(null("deg"));
        }
        let deg = std::slice::from_raw_parts(deg, deg_len).to_vec();
        let spec = JobSpec {
            target: Target::Descent,
            p,
            r,
            vars: deg.len().max(1),
            max_weight: deg.iter().sum(),
            max_dim,
            i,
            deg: Some(deg),
            kmax: (kmax > 0).then_some(kmax),
            denom: (denom > 0).then_some(denom),
            full: false,
        };
        let chart = run_job(spec, out)?;
        let status = if chart.pass { TrcalcStatus::Ok } else { TrcalcStatus::Fail };
        if !chart.pass {
            set_error("E_2 page disagrees with the closed form".into());
        }
        *out = Box::into_raw(Box::new(chart));
        Ok(status)
    })
}

/// Number of cells in a chart, or 0 for a null handle.
///
/// # Safety
/// `chart` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trcalc_chart_cell_count(chart: *const TrcalcChart) -> usize {
    chart.as_ref().map_or(0, |c| c.file.cells.len())
}

/// Fills `*out` with a view of cell `index`.
///
/// # Safety
/// `chart` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn trcalc_chart_cell(
    chart: *const TrcalcChart,
    index: usize,
    out: *mut TrcalcCell,
) -> TrcalcStatus {
    guard(|| {
        let chart = chart.as_ref().ok_or_else(|| null("chart"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cell = chart
            .file
            .cells
            .get(index)
            .ok_or_else(|| usage(format!("cell {index} out of range ({} cells)", chart.file.cells.len())))?;
        *out = TrcalcCell {
            deg: cell.deg.as_ptr(),
            deg_len: cell.deg.len(),
            dim: cell.dim,
            exps: cell.exps.as_ptr(),
            exps_len: cell.exps.len(),
        };
        Ok(TrcalcStatus::Ok)
    })
}

/// Serializes a chart in the CLI's JSON format. Free the string with
/// [`trcalc_string_free`].
///
/// # Safety
/// `chart` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn trcalc_chart_to_json(chart: *const TrcalcChart, out: *mut *mut c_char) -> TrcalcStatus {
    guard(|| {
        let chart = chart.as_ref().ok_or_else(|| null("chart"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = CString::new(chart.file.to_json()).map_err(|e| (TrcalcStatus::Fail, e.to_string()))?;
        *out = json.into_raw();
        Ok(TrcalcStatus::Ok)
    })
}

/// Exponents of π_{2a} of the fixed points of S^V ∧ THH(F_p) under the group
/// of order p^{r-1}, where V has rotation numbers `rotations[0..len]`.
/// Writes at most `cap` exponents and always stores the full count in
/// `*len_out`, so a call with `cap = 0` sizes the buffer.
///
/// # Safety
/// `rotations` must point to `len` values; `exps` must have room for `cap`
/// values (or be null with `cap = 0`); `len_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trcalc_smash_homotopy(
    p: u64,
    rotations: *const u64,
    len: usize,
    r: u32,
    a: i64,
    exps: *mut u32,
    cap: usize,
    len_out: *mut usize,
) -> TrcalcStatus {
    guard(|| {
        if len_out.is_null() {
            return Err(null("len_out"));
        }
        if rotations.is_null() && len > 0 {
            return Err(null("rotations"));
        }
        if exps.is_null() && cap > 0 {
            return Err(null("exps"));
        }
        if r == 0 {
            return Err(usage("r must be at least 1"));
        }
        let rot = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(rotations, len).to_vec() };
        let v = Rep::new(p, rot).map_err(|e| usage(e.to_string()))?;
        let group = smash_homotopy(&v, r, a);
        let e = group.exponents();
        *len_out = e.len();
        let n = e.len().min(cap);
        if n > 0 {
            ptr::copy_nonoverlapping(e.as_ptr(), exps, n);
        }
        Ok(TrcalcStatus::Ok)
    })
}

/// Releases a chart. Null is ignored.
///
/// # Safety
/// `chart` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trcalc_chart_free(chart: *mut TrcalcChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trcalc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn trcalc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
