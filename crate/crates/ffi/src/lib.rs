//! C ABI over `cavityshare`.
//!
//! Every fallible call returns a [`CsStatus`]; on failure a message for the
//! calling thread is available from [`cs_last_error`]. Handles are created by
//! `cs_*_new`/`cs_detect`/`cs_sweep` and released by the matching `*_free`.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cavityshare::analysis::{self, FreezeInterval, FreezeKind, SweepGrid};
use cavityshare::dynamics::{evolve_analytic, InitialCondition};
use cavityshare::entanglement::one_to_other;
use cavityshare::model::{build_block, ModelParams};
use cavityshare::{AmplitudeState, Error, Frame};
use num_complex::Complex64 as C64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    OutOfRange = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsInitKind {
    /// `|1,g,g>`.
    CavityExcited = 0,
    /// `cos θ |0,e,g> + sin θ |0,g,e>`, θ in radians.
    BellTheta = 1,
    /// Arbitrary normalized `(a0, a1, a2)`.
    General = 2,
}

/// Initial condition. `theta` is read for `BellTheta`, `re`/`im` for `General`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsInitial {
    pub kind: CsInitKind,
    pub theta: f64,
    pub re: [f64; 3],
    pub im: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsFreezeKind {
    Thawing = 0,
    Frozen = 1,
}

/// Model parameters.
pub struct CsModel {
    params: ModelParams,
}

/// Result of [`cs_detect`].
pub struct CsIntervals {
    intervals: Vec<FreezeInterval>,
}

/// Result of [`cs_sweep`].
pub struct CsSweepGrid {
    grid: SweepGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg);
    status
}

fn from_core(err: Error) -> CsStatus {
    let status = match err {
        Error::NotNormalized { .. } => CsStatus::NotNormalized,
        Error::InvalidParty(_) | Error::SameParty(..) => CsStatus::OutOfRange,
        _ => CsStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> CsStatus) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CsStatus::Panic, "internal panic"),
    }
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CsStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

fn initial(init: &CsInitial) -> Result<InitialCondition, CsStatus> {
    match init.kind {
        CsInitKind::CavityExcited => Ok(InitialCondition::CavityExcited),
        CsInitKind::BellTheta if init.theta.is_finite() => {
            Ok(InitialCondition::BellTheta(init.theta))
        }
        CsInitKind::BellTheta => Err(fail(CsStatus::InvalidArgument, "theta must be finite")),
        CsInitKind::General => {
            let a: [C64; 3] = std::array::from_fn(|k| C64::new(init.re[k], init.im[k]));
            InitialCondition::general(a[0], a[1], a[2]).map_err(from_core)
        }
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Creates a model with coupling `g > 0`, cavity frequency `omega` and
/// detuning `delta = omega0 − omega`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn cs_model_new(
    g: f64,
    omega: f64,
    delta: f64,
    out: *mut *mut CsModel,
) -> CsStatus {
    guard(|| {
        nonnull!(out);
        match ModelParams::with_detuning(g, omega, delta) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(CsModel { params }));
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `model` must come from [`cs_model_new`] and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cs_model_free(model: *mut CsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `G = √8 g`, or NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_model_big_g(model: *const CsModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.params.big_g())
}

/// Physical time for `τ = Gt/π`, or NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_model_time_from_tau(model: *const CsModel, tau: f64) -> f64 {
    model
        .as_ref()
        .map_or(f64::NAN, |m| m.params.time_from_tau(tau))
}

/// Slow-frame amplitudes at `τ`, written as `re[3]`, `im[3]`.
///
/// # Safety
/// Pointers must be valid; `re` and `im` must hold 3 doubles each.
#[no_mangle]
pub unsafe extern "C" fn cs_evolve(
    model: *const CsModel,
    init: *const CsInitial,
    tau: f64,
    re: *mut f64,
    im: *mut f64,
) -> CsStatus {
    guard(|| {
        nonnull!(model, init, re, im);
        if !(tau.is_finite() && tau >= 0.0) {
            return fail(CsStatus::InvalidArgument, "tau must be finite and >= 0");
        }
        let init = match initial(&*init) {
            Ok(i) => i,
            Err(s) => return s,
        };
        let p = &(*model).params;
        let state = evolve_analytic(&init, p, p.time_from_tau(tau));
        for (k, a) in state.amplitudes.iter().enumerate() {
            *re.add(k) = a.re;
            *im.add(k) = a.im;
        }
        CsStatus::Ok
    })
}

/// `(Y0, Y1, Y2)` of the state `(re[k] + i·im[k])`, written to `y[3]`.
///
/// # Safety
/// `re` and `im` must point to 3 doubles, `y` to room for 3.
#[no_mangle]
pub unsafe extern "C" fn cs_entanglement(re: *const f64, im: *const f64, y: *mut f64) -> CsStatus {
    guard(|| {
        nonnull!(re, im, y);
        let a: [C64; 3] = std::array::from_fn(|k| C64::new(*re.add(k), *im.add(k)));
        match one_to_other(&AmplitudeState::new(a, Frame::Slow, 0.0)) {
            Ok(t) => {
                for (k, v) in t.as_array().into_iter().enumerate() {
                    *y.add(k) = v;
                }
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Closed-form `Y_S(τ)` for the cavity-excited start.
#[no_mangle]
pub extern "C" fn cs_ys_class1(tau: f64) -> f64 {
    analysis::ys_class1(tau)
}

/// Closed-form `Y_S(τ)` for the Bell-θ start, θ in radians.
#[no_mangle]
pub extern "C" fn cs_ys_class2(theta: f64, tau: f64) -> f64 {
    analysis::ys_class2(theta, tau)
}

/// `Y_S(τ)` through the amplitudes, any detuning.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_ys_dynamic(
    model: *const CsModel,
    init: *const CsInitial,
    tau: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        nonnull!(model, init, out);
        let init = match initial(&*init) {
            Ok(i) => i,
            Err(s) => return s,
        };
        match analysis::ys_dynamic(&init, &(*model).params, tau) {
            Ok(v) => {
                *out = v;
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Frozen/thawing intervals of `Y_S` on `[start, end]`.
///
/// # Safety
/// Pointers must be valid; free the result with [`cs_intervals_free`].
#[no_mangle]
pub unsafe extern "C" fn cs_detect(
    model: *const CsModel,
    init: *const CsInitial,
    start: f64,
    end: f64,
    freeze_tol: f64,
    scan_step: f64,
    out: *mut *mut CsIntervals,
) -> CsStatus {
    guard(|| {
        nonnull!(model, init, out);
        let init = match initial(&*init) {
            Ok(i) => i,
            Err(s) => return s,
        };
        let p = &(*model).params;
        let curve = |tau| analysis::ys_dynamic(&init, p, tau).unwrap_or(f64::NAN);
        match analysis::detect_intervals(curve, start, end, freeze_tol, scan_step) {
            Ok(intervals) => {
                *out = Box::into_raw(Box::new(CsIntervals { intervals }));
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Number of intervals, 0 for null.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_intervals_len(h: *const CsIntervals) -> usize {
    h.as_ref().map_or(0, |h| h.intervals.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_intervals_get(
    h: *const CsIntervals,
    index: usize,
    t_start: *mut f64,
    t_end: *mut f64,
    kind: *mut CsFreezeKind,
) -> CsStatus {
    guard(|| {
        nonnull!(h, t_start, t_end, kind);
        let intervals = &(*h).intervals;
        let Some(iv) = intervals.get(index) else {
            return fail(
                CsStatus::OutOfRange,
                format!("interval {index} out of range"),
            );
        };
        *t_start = iv.t_start;
        *t_end = iv.t_end;
        *kind = match iv.kind {
            FreezeKind::Frozen => CsFreezeKind::Frozen,
            FreezeKind::Thawing => CsFreezeKind::Thawing,
        };
        CsStatus::Ok
    })
}

/// # Safety
/// `h` must come from [`cs_detect`]. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cs_intervals_free(h: *mut CsIntervals) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `Y_S` over `theta_over_pi[rows] × tau[cols]` for Bell-θ starts.
///
/// # Safety
/// Arrays must hold the stated counts; free the result with [`cs_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn cs_sweep(
    model: *const CsModel,
    theta_over_pi: *const f64,
    rows: usize,
    tau: *const f64,
    cols: usize,
    out: *mut *mut CsSweepGrid,
) -> CsStatus {
    guard(|| {
        nonnull!(model, theta_over_pi, tau, out);
        let thetas = std::slice::from_raw_parts(theta_over_pi, rows);
        let taus = std::slice::from_raw_parts(tau, cols);
        match analysis::sweep(thetas, taus, &(*model).params) {
            Ok(grid) => {
                *out = Box::into_raw(Box::new(CsSweepGrid { grid }));
                CsStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_rows(h: *const CsSweepGrid) -> usize {
    h.as_ref().map_or(0, |h| h.grid.rows())
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_cols(h: *const CsSweepGrid) -> usize {
    h.as_ref().map_or(0, |h| h.grid.cols())
}

/// Row-major values, `rows × cols` long, owned by the handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_values(h: *const CsSweepGrid) -> *const f64 {
    h.as_ref().map_or(ptr::null(), |h| h.grid.values.as_ptr())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_value(
    h: *const CsSweepGrid,
    row: usize,
    col: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        nonnull!(h, out);
        let g = &(*h).grid;
        if row >= g.rows() || col >= g.cols() {
            return fail(
                CsStatus::OutOfRange,
                format!("cell ({row}, {col}) outside {}×{}", g.rows(), g.cols()),
            );
        }
        *out = g.value(row, col);
        CsStatus::Ok
    })
}

/// # Safety
/// `h` must come from [`cs_sweep`]. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cs_sweep_free(h: *mut CsSweepGrid) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Hamiltonian block of excitation number `m`, row-major into `out`
/// (capacity `cap` doubles). `*dim` receives the block dimension
/// (1 for `m = 0`, 3 for `m = 1`, 4 above).
///
/// # Safety
/// Pointers must be valid; `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_build_block(
    model: *const CsModel,
    m: i64,
    out: *mut f64,
    cap: usize,
    dim: *mut usize,
) -> CsStatus {
    guard(|| {
        nonnull!(model, out, dim);
        let Ok(m) = u32::try_from(m) else {
            return fail(
                CsStatus::InvalidArgument,
                format!("excitation number must be in 0..=2^32-1, got {m}"),
            );
        };
        let block = build_block(m, &(*model).params);
        let entries = block.as_slice();
        if entries.len() > cap {
            return fail(
                CsStatus::OutOfRange,
                format!("block needs {} doubles, buffer holds {cap}", entries.len()),
            );
        }
        ptr::copy_nonoverlapping(entries.as_ptr(), out, entries.len());
        *dim = block.dim();
        CsStatus::Ok
    })
}
