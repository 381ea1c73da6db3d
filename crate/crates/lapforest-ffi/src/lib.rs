//! C ABI for the lapforest library.
//!
//! The digraph is an opaque handle created by [`lf_digraph_parse`] and
//! released by [`lf_digraph_free`]. Matrix outputs are written into
//! caller-provided row-major `n * n` buffers; string outputs are allocated
//! here and must be released with [`lf_string_free`]. Every fallible call
//! returns an [`LfStatus`]; on failure a thread-local message is available
//! through [`lf_last_error_message`] until the next failing call on the
//! same thread.

use lapforest::digraph::{laplacian, Digraph};
use lapforest::dynamics::{self, LongRunMode};
use lapforest::report::{self, AnalysisOptions};
use lapforest::{components, forests, spectral};
use nalgebra::{DMatrix, DVector};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    /// Success.
    Ok = 0,
    /// A pointer was null or an argument out of range.
    InvalidArgument = 1,
    /// The edge-list text was rejected; see `lf_last_error_message`.
    ParseError = 2,
    /// A numeric routine failed to converge or was ill-conditioned.
    NumericalError = 3,
    /// The graph exceeds the forest enumeration limit or family budget.
    TooLarge = 4,
    /// An output buffer has the wrong length.
    BadBufferLength = 5,
    /// A precondition on the dynamics was violated (step size, mode).
    PreconditionViolated = 6,
}

/// Long-run matrix mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfLongRunMode {
    /// Repeated squaring; requires a stochastic P with positive diagonal.
    Power = 0,
    /// Cesaro averaging; requires a stochastic P.
    Cesaro = 1,
}

/// Opaque digraph handle.
pub struct LfDigraph {
    inner: Digraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: LfStatus, message: impl AsRef<str>) -> LfStatus {
    set_error(message);
    status
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses an edge-list text ("n m" header, then "i j [w]" lines) into a new
/// digraph handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_digraph_parse(
    text: *const c_char,
    out: *mut *mut LfDigraph,
) -> LfStatus {
    if text.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return fail(LfStatus::InvalidArgument, "text is not valid UTF-8");
    };
    match Digraph::parse_edge_list(text) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LfDigraph { inner: g }));
            LfStatus::Ok
        }
        Err(e) => fail(LfStatus::ParseError, e.to_string()),
    }
}

/// Releases a digraph handle. Passing null is a no-op.
///
/// # Safety
/// `g` must have been returned by [`lf_digraph_parse`] and not freed before.
#[no_mangle]
pub unsafe extern "C" fn lf_digraph_free(g: *mut LfDigraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle from [`lf_digraph_parse`].
#[no_mangle]
pub unsafe extern "C" fn lf_digraph_vertex_count(g: *const LfDigraph) -> usize {
    if g.is_null() {
        return 0;
    }
    (*g).inner.n()
}

/// # Safety
/// `g` must be a live handle from [`lf_digraph_parse`].
#[no_mangle]
pub unsafe extern "C" fn lf_digraph_arc_count(g: *const LfDigraph) -> usize {
    if g.is_null() {
        return 0;
    }
    (*g).inner.arc_count()
}

unsafe fn write_matrix(m: &DMatrix<f64>, out: *mut f64, len: usize) -> LfStatus {
    let n = m.nrows();
    if len != n * n {
        return fail(
            LfStatus::BadBufferLength,
            format!("expected buffer of {} entries, got {len}", n * n),
        );
    }
    for i in 0..n {
        for j in 0..n {
            *out.add(i * n + j) = m[(i, j)];
        }
    }
    LfStatus::Ok
}

/// Writes the Laplacian L = D - A row-major into `out` (`len == n * n`).
///
/// # Safety
/// `g` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_digraph_laplacian(
    g: *const LfDigraph,
    out: *mut f64,
    len: usize,
) -> LfStatus {
    if g.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    write_matrix(laplacian(&(*g).inner).matrix(), out, len)
}

/// The in-forest dimension by the structural route (number of sink SCCs).
///
/// # Safety
/// `g` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_dimension(g: *const LfDigraph, out: *mut usize) -> LfStatus {
    if g.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let decomposition = components::decompose(&(*g).inner);
    *out = components::forest_dimension_structural(&decomposition);
    LfStatus::Ok
}

/// Writes the normalized matrix of maximal in-forests into `out`
/// (`len == n * n`), the exact enumeration route.
///
/// # Safety
/// `g` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_forest_matrix(
    g: *const LfDigraph,
    out: *mut f64,
    len: usize,
) -> LfStatus {
    if g.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    match forests::enumerate_maximal_in_forests(&(*g).inner) {
        Ok(family) => write_matrix(forests::forest_matrix(&family).matrix(), out, len),
        Err(e) => fail(LfStatus::TooLarge, e.to_string()),
    }
}

/// Writes the resolvent projector (I + tau L)^{-1} into `out`. Pass
/// `tau <= 0` for the default 1e8.
///
/// # Safety
/// `g` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_resolvent_projector(
    g: *const LfDigraph,
    tau: f64,
    out: *mut f64,
    len: usize,
) -> LfStatus {
    if g.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let tau = if tau > 0.0 {
        tau
    } else {
        spectral::DEFAULT_RESOLVENT_TAU
    };
    match spectral::eigenprojector_resolvent(&laplacian(&(*g).inner), tau) {
        Ok(m) => write_matrix(&m, out, len),
        Err(e) => fail(LfStatus::NumericalError, e.to_string()),
    }
}

/// Writes the long-run limit of P = I - eps L into `out`. Pass
/// `epsilon <= 0` for the default 1/(2 max out-degree).
///
/// # Safety
/// `g` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_long_run_matrix(
    g: *const LfDigraph,
    epsilon: f64,
    mode: LfLongRunMode,
    out: *mut f64,
    len: usize,
) -> LfStatus {
    if g.is_null() || out.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let epsilon = (epsilon > 0.0).then_some(epsilon);
    let mode = match mode {
        LfLongRunMode::Power => LongRunMode::Power,
        LfLongRunMode::Cesaro => LongRunMode::Cesaro,
    };
    let result = dynamics::perron(&laplacian(&(*g).inner), epsilon)
        .and_then(|p| dynamics::long_run_matrix(&p, mode, None, None));
    match result {
        Ok(m) => write_matrix(&m, out, len),
        Err(e @ dynamics::DynamicsError::NotStochastic { .. })
        | Err(e @ dynamics::DynamicsError::NoPositiveDiagonal { .. }) => {
            fail(LfStatus::PreconditionViolated, e.to_string())
        }
        Err(e) => fail(LfStatus::NumericalError, e.to_string()),
    }
}

/// Writes the eigenvalues of L (sorted by real, then imaginary part) into
/// `out_re` / `out_im`, each of length `len == n`.
///
/// # Safety
/// `g` must be a live handle; both outputs must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_spectrum(
    g: *const LfDigraph,
    out_re: *mut f64,
    out_im: *mut f64,
    len: usize,
) -> LfStatus {
    if g.is_null() || out_re.is_null() || out_im.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let n = (*g).inner.n();
    if len != n {
        return fail(
            LfStatus::BadBufferLength,
            format!("expected buffer of {n} entries, got {len}"),
        );
    }
    match spectral::spectrum(&laplacian(&(*g).inner), None) {
        Ok(report) => {
            for (i, ev) in report.eigenvalues.iter().enumerate() {
                *out_re.add(i) = ev.re;
                *out_im.add(i) = ev.im;
            }
            LfStatus::Ok
        }
        Err(e) => fail(LfStatus::NumericalError, e.to_string()),
    }
}

unsafe fn string_out(s: String, out: *mut *mut c_char) -> LfStatus {
    match CString::new(s) {
        Ok(cs) => {
            *out = cs.into_raw();
            LfStatus::Ok
        }
        Err(_) => fail(LfStatus::NumericalError, "output contained a NUL byte"),
    }
}

/// Runs the full cross-check battery and returns the JSON report as a
/// NUL-terminated string (release with [`lf_string_free`]). Pass
/// `tau <= 0` and/or `epsilon <= 0` for the defaults.
///
/// # Safety
/// `g` must be a live handle; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_analyze_json(
    g: *const LfDigraph,
    tau: f64,
    epsilon: f64,
    out_json: *mut *mut c_char,
) -> LfStatus {
    if g.is_null() || out_json.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let opts = AnalysisOptions {
        tau: if tau > 0.0 {
            tau
        } else {
            spectral::DEFAULT_RESOLVENT_TAU
        },
        epsilon: (epsilon > 0.0).then_some(epsilon),
        ..AnalysisOptions::default()
    };
    let inner = &(*g).inner;
    let result = catch_unwind(AssertUnwindSafe(|| report::analyze(inner, &opts)));
    match result {
        Ok(Ok(report)) => string_out(report.to_json().to_string(), out_json),
        Ok(Err(e)) => fail(LfStatus::NumericalError, e.to_string()),
        Err(_) => fail(LfStatus::NumericalError, "internal panic during analysis"),
    }
}

/// Simulates the discrete iteration x(k+1) = (I - eps L) x(k) for `steps`
/// steps and returns the trajectory as CSV (`t,x0,...`). Pass
/// `epsilon <= 0` for the default.
///
/// # Safety
/// `g` must be a live handle; `x0` must point to `x0_len` readable doubles;
/// `out_csv` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_simulate_discrete_csv(
    g: *const LfDigraph,
    epsilon: f64,
    x0: *const f64,
    x0_len: usize,
    steps: usize,
    out_csv: *mut *mut c_char,
) -> LfStatus {
    if g.is_null() || x0.is_null() || out_csv.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let x0 = DVector::from_fn(x0_len, |i, _| *x0.add(i));
    let result = dynamics::perron(&laplacian(&(*g).inner), (epsilon > 0.0).then_some(epsilon))
        .and_then(|p| dynamics::simulate_discrete(&p, &x0, steps));
    match result {
        Ok(record) => string_out(record.to_csv(), out_csv),
        Err(e @ dynamics::DynamicsError::DimensionMismatch { .. }) => {
            fail(LfStatus::BadBufferLength, e.to_string())
        }
        Err(e) => fail(LfStatus::NumericalError, e.to_string()),
    }
}

/// Integrates x' = -L x to `t_end` and returns the trajectory as CSV. Pass
/// `dt <= 0` for the default 0.25 / max out-degree.
///
/// # Safety
/// `g` must be a live handle; `x0` must point to `x0_len` readable doubles;
/// `out_csv` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_simulate_continuous_csv(
    g: *const LfDigraph,
    x0: *const f64,
    x0_len: usize,
    t_end: f64,
    dt: f64,
    out_csv: *mut *mut c_char,
) -> LfStatus {
    if g.is_null() || x0.is_null() || out_csv.is_null() {
        return fail(LfStatus::InvalidArgument, "null pointer");
    }
    let l = laplacian(&(*g).inner);
    let dt = if dt > 0.0 {
        dt
    } else if l.max_diagonal() > 0.0 {
        0.25 / l.max_diagonal()
    } else {
        t_end / 100.0
    };
    let x0 = DVector::from_fn(x0_len, |i, _| *x0.add(i));
    match dynamics::simulate_continuous(&l, &x0, t_end, dt) {
        Ok(record) => string_out(record.to_csv(), out_csv),
        Err(e @ dynamics::DynamicsError::DimensionMismatch { .. }) => {
            fail(LfStatus::BadBufferLength, e.to_string())
        }
        Err(e @ dynamics::DynamicsError::UnstableTimeStep { .. })
        | Err(e @ dynamics::DynamicsError::BadTimeHorizon { .. }) => {
            fail(LfStatus::PreconditionViolated, e.to_string())
        }
        Err(e) => fail(LfStatus::NumericalError, e.to_string()),
    }
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must have been returned by a `lf_*` call and not freed before.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
