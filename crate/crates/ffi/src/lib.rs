//! C interface to `seqshare`.
//!
//! Every function returns a status code and writes results through out
//! pointers. On failure the message is available from
//! [`seqshare_last_error_message`] on the same thread. Handles are created
//! by `*_new` functions and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use seqshare::oracle;
use seqshare::solver::{self, ScenarioConfig, SolverOptions};
use seqshare::{analytic, Error, PointerKind, PointerModel, QualityCurve, Scenario};

pub type SeqshareStatus = i32;

pub const SEQSHARE_OK: SeqshareStatus = 0;
pub const SEQSHARE_INVALID_ARGUMENT: SeqshareStatus = 1;
/// Valid query whose answer is "no solution" (e.g. observer cannot witness).
pub const SEQSHARE_INFEASIBLE: SeqshareStatus = 2;
pub const SEQSHARE_NOT_FOUND: SeqshareStatus = 3;
pub const SEQSHARE_NUMERIC_FAILURE: SeqshareStatus = 4;
pub const SEQSHARE_NULL_POINTER: SeqshareStatus = 5;
pub const SEQSHARE_IO: SeqshareStatus = 6;
pub const SEQSHARE_PANIC: SeqshareStatus = 7;
pub const SEQSHARE_UNSUPPORTED: SeqshareStatus = 8;

pub const SEQSHARE_SCENARIO_OS1: u32 = 0;
pub const SEQSHARE_SCENARIO_OS2: u32 = 1;
pub const SEQSHARE_SCENARIO_TS1: u32 = 2;
pub const SEQSHARE_SCENARIO_TS2: u32 = 3;

pub const SEQSHARE_POINTER_UNSHARP: u32 = 0;
pub const SEQSHARE_POINTER_OPTIMAL: u32 = 1;
pub const SEQSHARE_POINTER_SQUARE: u32 = 2;

/// Pointer model (F as a function of G).
pub struct SeqsharePointer(PointerModel);

/// Scenario, dimension, pointer and isotropic weight.
pub struct SeqshareConfig(ScenarioConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SeqshareStatus {
    match e {
        Error::Infeasible(_) => SEQSHARE_INFEASIBLE,
        Error::NotFound(_) => SEQSHARE_NOT_FOUND,
        Error::NumericFailure(_) => SEQSHARE_NUMERIC_FAILURE,
        Error::Io(_) | Error::Csv(_) => SEQSHARE_IO,
        Error::UnsupportedDimension(_) | Error::UnsupportedScenario(_) | Error::OracleLimit(_) => {
            SEQSHARE_UNSUPPORTED
        }
        _ => SEQSHARE_INVALID_ARGUMENT,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Infeasible(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard<F: FnOnce() -> Outcome>(f: F) -> SeqshareStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SEQSHARE_OK
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            SEQSHARE_NULL_POINTER
        }
        Ok(Err(Failure::Infeasible(what))) => {
            set_error(format!("infeasible: {what}"));
            SEQSHARE_INFEASIBLE
        }
        Err(_) => {
            set_error("internal panic".into());
            SEQSHARE_PANIC
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn input<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn scenario_of(code: u32) -> Result<Scenario, Failure> {
    match code {
        SEQSHARE_SCENARIO_OS1 => Ok(Scenario::Os1),
        SEQSHARE_SCENARIO_OS2 => Ok(Scenario::Os2),
        SEQSHARE_SCENARIO_TS1 => Ok(Scenario::Ts1),
        SEQSHARE_SCENARIO_TS2 => Ok(Scenario::Ts2),
        _ => Err(Error::Domain(format!("unknown scenario code {code}")).into()),
    }
}

/// Nonpositive or non-finite `tol` selects the default.
fn options(tol: f64) -> SolverOptions {
    if tol.is_finite() && tol > 0.0 {
        SolverOptions {
            tol,
            ..SolverOptions::default()
        }
    } else {
        SolverOptions::default()
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn seqshare_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn seqshare_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out_pointer` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_pointer_new(kind: u32, out_pointer: *mut *mut SeqsharePointer) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_pointer, "out_pointer")?;
        let kind = match kind {
            SEQSHARE_POINTER_UNSHARP => PointerKind::Unsharp,
            SEQSHARE_POINTER_OPTIMAL => PointerKind::Optimal,
            SEQSHARE_POINTER_SQUARE => PointerKind::Square,
            _ => return Err(Error::Domain(format!("unknown pointer code {kind}")).into()),
        };
        *slot = Box::into_raw(Box::new(SeqsharePointer(PointerModel::from_kind(kind, None)?)));
        Ok(())
    })
}

/// Custom pointer from tabulated `(g[i], f[i])` points.
///
/// # Safety
/// `g` and `f` must point to `len` readable doubles; `out_pointer` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_pointer_from_points(
    g: *const f64,
    f: *const f64,
    len: usize,
    out_pointer: *mut *mut SeqsharePointer,
) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_pointer, "out_pointer")?;
        let g = slice(g, len, "g")?;
        let f = slice(f, len, "f")?;
        let curve = QualityCurve::new(g.iter().copied().zip(f.iter().copied()).collect())?;
        *slot = Box::into_raw(Box::new(SeqsharePointer(PointerModel::custom(curve))));
        Ok(())
    })
}

/// Custom pointer from a CSV file with header `G,F`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_pointer` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_pointer_from_csv(
    path: *const c_char,
    out_pointer: *mut *mut SeqsharePointer,
) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_pointer, "out_pointer")?;
        input(path, "path")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Error::Domain("path is not UTF-8".into()))?;
        let curve = QualityCurve::from_path(path)?;
        *slot = Box::into_raw(Box::new(SeqsharePointer(PointerModel::custom(curve))));
        Ok(())
    })
}

/// # Safety
/// `pointer` must come from a `seqshare_pointer_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn seqshare_pointer_free(pointer: *mut SeqsharePointer) {
    if !pointer.is_null() {
        drop(Box::from_raw(pointer));
    }
}

/// Quality factor `F(G)` in dimension `d`.
///
/// # Safety
/// `pointer` must be a live handle; `out_f` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_pointer_quality(
    pointer: *const SeqsharePointer,
    d: u64,
    g: f64,
    out_f: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let pointer = input(pointer, "pointer")?;
        let slot = out(out_f, "out_f")?;
        *slot = pointer.0.quality(d, g)?;
        Ok(())
    })
}

/// The configuration keeps its own copy of the pointer model.
///
/// # Safety
/// `pointer` must be a live handle; `out_config` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_config_new(
    scenario: u32,
    d: u64,
    pointer: *const SeqsharePointer,
    p: f64,
    out_config: *mut *mut SeqshareConfig,
) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let pointer = input(pointer, "pointer")?;
        let config = ScenarioConfig::new(scenario_of(scenario)?, d, pointer.0.clone()).with_weight(p);
        config.validate()?;
        *slot = Box::into_raw(Box::new(SeqshareConfig(config)));
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`seqshare_config_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn seqshare_config_free(config: *mut SeqshareConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Critical precision of the first observer. `SEQSHARE_INFEASIBLE` when
/// no precision lets it witness entanglement.
///
/// # Safety
/// `config` must be a live handle; `out_g` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_critical_g1(
    config: *const SeqshareConfig,
    tol: f64,
    out_g: *mut f64,
) -> SeqshareStatus {
    seqshare_critical_gn(config, 1, tol, out_g)
}

/// Critical precision of observer `n` when every predecessor measures at
/// its own critical precision.
///
/// # Safety
/// `config` must be a live handle; `out_g` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_critical_gn(
    config: *const SeqshareConfig,
    n: usize,
    tol: f64,
    out_g: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let config = input(config, "config")?;
        let slot = out(out_g, "out_g")?;
        let r = solver::critical_gn(&config.0, n, &options(tol))?;
        *slot = r.g_crit.ok_or(Failure::Infeasible("observer cannot witness entanglement"))?;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle; `out_n` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_max_observers(
    config: *const SeqshareConfig,
    tol: f64,
    out_n: *mut usize,
) -> SeqshareStatus {
    guard(|| {
        let config = input(config, "config")?;
        let slot = out(out_n, "out_n")?;
        *slot = solver::max_observers(&config.0, &options(tol))?;
        Ok(())
    })
}

/// Smallest `d <= d_hi` with at least `target_n` observers;
/// `SEQSHARE_NOT_FOUND` past the cap.
///
/// # Safety
/// `pointer` must be a live handle; `out_d` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_min_dimension(
    scenario: u32,
    pointer: *const SeqsharePointer,
    target_n: usize,
    d_hi: u64,
    tol: f64,
    out_d: *mut u64,
) -> SeqshareStatus {
    guard(|| {
        let pointer = input(pointer, "pointer")?;
        let slot = out(out_d, "out_d")?;
        *slot = solver::min_dimension(scenario_of(scenario)?, &pointer.0, target_n, d_hi, &options(tol))?;
        Ok(())
    })
}

/// Writes `p1` always and `p2` when it exists; `SEQSHARE_INFEASIBLE` when
/// a second observer cannot witness for any weight.
///
/// # Safety
/// `config` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_isotropic_thresholds(
    config: *const SeqshareConfig,
    tol: f64,
    out_p1: *mut f64,
    out_p2: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let config = input(config, "config")?;
        let p1 = out(out_p1, "out_p1")?;
        let p2 = out(out_p2, "out_p2")?;
        let t = solver::isotropic_thresholds(&config.0, &options(tol))?;
        *p1 = t.p1;
        *p2 = t.p2.ok_or(Failure::Infeasible("no weight admits a second observer"))?;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_equal_precision_bounds(
    config: *const SeqshareConfig,
    tol: f64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let config = input(config, "config")?;
        let lo = out(out_lower, "out_lower")?;
        let hi = out(out_upper, "out_upper")?;
        let b = solver::equal_precision_bounds(&config.0, &options(tol))?
            .ok_or(Failure::Infeasible("no common precision works for both observers"))?;
        *lo = b.g_lower;
        *hi = b.g_upper;
        Ok(())
    })
}

/// Closed-form uncertainty of observer `len + 1` whose predecessors have
/// quality factors `f_list[0..len]`.
///
/// # Safety
/// `f_list` must point to `len` readable doubles; `out_u` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_uncertainty(
    scenario: u32,
    d: u64,
    g_n: f64,
    f_list: *const f64,
    len: usize,
    p: f64,
    out_u: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_u, "out_u")?;
        let f = slice(f_list, len, "f_list")?;
        let params = analytic::ChainParams::new(d, g_n, f.to_vec()).with_weight(p);
        *slot = analytic::scenario_uncertainty(scenario_of(scenario)?, &params)?;
        Ok(())
    })
}

/// Same quantity as [`seqshare_uncertainty`] from explicit density
/// matrices (`d <= 11`, at most 4 observers). Predecessor `k` measures with
/// precision `g_prev[k]` and quality `f_prev[k]`.
///
/// # Safety
/// `g_prev` and `f_prev` must point to `len` readable doubles; `out_u`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn seqshare_oracle_uncertainty(
    scenario: u32,
    d: u64,
    p: f64,
    g_n: f64,
    g_prev: *const f64,
    f_prev: *const f64,
    len: usize,
    out_u: *mut f64,
) -> SeqshareStatus {
    guard(|| {
        let slot = out(out_u, "out_u")?;
        let g = slice(g_prev, len, "g_prev")?;
        let f = slice(f_prev, len, "f_prev")?;
        let pairs: Vec<_> = g.iter().copied().zip(f.iter().copied()).collect();
        let d = usize::try_from(d).map_err(|_| Error::OracleLimit(format!("d = {d}")))?;
        *slot = oracle::canonical_uncertainty(scenario_of(scenario)?, d, p, g_n, &pairs)?;
        Ok(())
    })
}
