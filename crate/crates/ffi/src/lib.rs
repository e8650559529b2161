//! C ABI for the pastent library.
//!
//! Objects are opaque handles created by `pastent_distribution_parse` or
//! `pastent_reconstruct` and released with the matching `_free`. Fallible
//! calls return a [`PastentStatus`] and write results through out-pointers;
//! on failure the message is available from [`pastent_last_error_message`]
//! on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pastent::characterization::{
    reconstruct_cdf, theorem_check, Anchor, ReconstructConfig, ReconstructionResult, Verdict,
};
use pastent::estimation::{past_entropy_estimate, Sample};
use pastent::measures::{evaluate, MeasureCurve, MeasureKind};
use pastent::{Distribution, Error, QuadratureConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Parse = 3,
    Domain = 4,
    Degenerate = 5,
    Precondition = 6,
    InsufficientData = 7,
    /// Quadrature, root finding or reconstruction did not reach tolerance.
    Numerical = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastentMeasure {
    Shannon = 0,
    Residual = 1,
    PastDirect = 2,
    PastPit = 3,
    PastCondexp = 4,
    ReversedHazard = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PastentVerdictKind {
    PremisesFail = 0,
    Consistent = 1,
    CounterexampleCandidate = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PastentQuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub tail_cut: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PastentVerdict {
    pub t0: f64,
    pub cdf_gap: f64,
    pub entropy_gap: f64,
    pub mismatch: f64,
    pub conclusion_distance: f64,
    pub verdict: PastentVerdictKind,
}

/// Opaque lifetime distribution.
pub struct PastentDistribution {
    inner: Distribution,
}

/// Opaque reconstruction result.
pub struct PastentReconstruction {
    inner: ReconstructionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PastentStatus {
    match e {
        Error::InvalidParameter(_) => PastentStatus::InvalidParameter,
        Error::Parse(_) => PastentStatus::Parse,
        Error::Domain(_) => PastentStatus::Domain,
        Error::Degenerate(_) | Error::DegenerateSample(_) => PastentStatus::Degenerate,
        Error::Precondition(_) => PastentStatus::Precondition,
        Error::InsufficientData { .. } => PastentStatus::InsufficientData,
        Error::Io(_) => PastentStatus::Io,
        Error::AtPoint { source, .. } => status_of(source),
        _ if e.is_numerical() => PastentStatus::Numerical,
        _ => PastentStatus::InvalidParameter,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F>(f: F) -> PastentStatus
where
    F: FnOnce() -> Result<(), PastentStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PastentStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic".into());
            PastentStatus::Panic
        }
    }
}

fn check<T>(r: pastent::Result<T>) -> Result<T, PastentStatus> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        status_of(&e)
    })
}

fn null_error(what: &str) -> PastentStatus {
    set_last_error(format!("null pointer: {what}"));
    PastentStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, PastentStatus> {
    p.as_ref().ok_or_else(|| null_error(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), PastentStatus> {
    if p.is_null() {
        return Err(null_error(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn quad_config(cfg: *const PastentQuadConfig) -> Result<QuadratureConfig, PastentStatus> {
    let Some(c) = cfg.as_ref() else {
        return Ok(QuadratureConfig::default());
    };
    let q = QuadratureConfig {
        abs_tol: c.abs_tol,
        rel_tol: c.rel_tol,
        max_depth: c.max_depth,
        tail_cut: c.tail_cut,
    };
    check(q.validate())?;
    Ok(q)
}

fn measure_kind(m: PastentMeasure) -> MeasureKind {
    match m {
        PastentMeasure::Shannon => MeasureKind::Shannon,
        PastentMeasure::Residual => MeasureKind::Residual,
        PastentMeasure::PastDirect => MeasureKind::PastDirect,
        PastentMeasure::PastPit => MeasureKind::PastPit,
        PastentMeasure::PastCondexp => MeasureKind::PastCondexp,
        PastentMeasure::ReversedHazard => MeasureKind::ReversedHazard,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pastent_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default quadrature tolerances.
#[no_mangle]
pub extern "C" fn pastent_quad_config_default() -> PastentQuadConfig {
    let q = QuadratureConfig::default();
    PastentQuadConfig {
        abs_tol: q.abs_tol,
        rel_tol: q.rel_tol,
        max_depth: q.max_depth,
        tail_cut: q.tail_cut,
    }
}

/// Parses a spec such as `weibull:shape=2,scale=1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pastent_distribution_parse(
    spec: *const c_char,
    out: *mut *mut PastentDistribution,
) -> PastentStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null_error("spec"));
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|_| {
            set_last_error("spec is not valid UTF-8".into());
            PastentStatus::Parse
        })?;
        let inner: Distribution = check(text.parse())?;
        write_out(
            out,
            Box::into_raw(Box::new(PastentDistribution { inner })),
            "out",
        )
    })
}

/// # Safety
/// `dist` must come from `pastent_distribution_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pastent_distribution_free(dist: *mut PastentDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Writes the canonical spec text into `buf` (NUL-terminated, truncated to
/// `len`) and returns the full length without the terminator.
///
/// # Safety
/// `dist` must be valid; `buf` must hold `len` bytes or be NULL with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn pastent_distribution_spec(
    dist: *const PastentDistribution,
    buf: *mut c_char,
    len: usize,
) -> usize {
    let Some(d) = dist.as_ref() else { return 0 };
    let text = d.inner.to_string();
    if !buf.is_null() && len > 0 {
        let n = text.len().min(len - 1);
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pastent_pdf(
    dist: *const PastentDistribution,
    x: f64,
    out: *mut f64,
) -> PastentStatus {
    guard(|| write_out(out, deref(dist, "dist")?.inner.pdf(x), "out"))
}

/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pastent_cdf(
    dist: *const PastentDistribution,
    x: f64,
    out: *mut f64,
) -> PastentStatus {
    guard(|| write_out(out, deref(dist, "dist")?.inner.cdf(x), "out"))
}

/// # Safety
/// `dist` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pastent_quantile(
    dist: *const PastentDistribution,
    u: f64,
    out: *mut f64,
) -> PastentStatus {
    guard(|| {
        let q = check(deref(dist, "dist")?.inner.quantile(u))?;
        write_out(out, q, "out")
    })
}

/// Evaluates one measure at `t`. `cfg` may be NULL for defaults.
///
/// # Safety
/// `dist` and `out` must be valid; `cfg` valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pastent_measure_eval(
    dist: *const PastentDistribution,
    measure: PastentMeasure,
    t: f64,
    cfg: *const PastentQuadConfig,
    out: *mut f64,
) -> PastentStatus {
    guard(|| {
        let d = deref(dist, "dist")?;
        let q = quad_config(cfg)?;
        let v = check(evaluate(&d.inner, measure_kind(measure), t, &q))?;
        write_out(out, v, "out")
    })
}

/// Single-point uniqueness check for a pair of laws. `cfg` may be NULL.
///
/// # Safety
/// `x`, `y` and `out` must be valid; `cfg` valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pastent_theorem_check(
    x: *const PastentDistribution,
    y: *const PastentDistribution,
    t0: f64,
    premise_tol: f64,
    separation_tol: f64,
    cfg: *const PastentQuadConfig,
    out: *mut PastentVerdict,
) -> PastentStatus {
    guard(|| {
        let (x, y) = (deref(x, "x")?, deref(y, "y")?);
        let q = quad_config(cfg)?;
        let v = check(theorem_check(
            &x.inner,
            &y.inner,
            t0,
            premise_tol,
            separation_tol,
            &q,
        ))?;
        let verdict = match v.verdict {
            Verdict::PremisesFail => PastentVerdictKind::PremisesFail,
            Verdict::Consistent => PastentVerdictKind::Consistent,
            Verdict::CounterexampleCandidate => PastentVerdictKind::CounterexampleCandidate,
        };
        write_out(
            out,
            PastentVerdict {
                t0: v.t0,
                cdf_gap: v.cdf_gap,
                entropy_gap: v.entropy_gap,
                mismatch: v.mismatch,
                conclusion_distance: v.conclusion_distance,
                verdict,
            },
            "out",
        )
    })
}

/// Reconstructs the reversed hazard and distribution function from a
/// past-entropy curve sampled at `n` increasing times, with default settings.
///
/// # Safety
/// `t` and `values` must point to `n` doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruct(
    t: *const f64,
    values: *const f64,
    n: usize,
    anchor_t: f64,
    anchor_cdf: f64,
    out: *mut *mut PastentReconstruction,
) -> PastentStatus {
    guard(|| {
        if t.is_null() || values.is_null() {
            return Err(null_error("curve arrays"));
        }
        let grid = std::slice::from_raw_parts(t, n).to_vec();
        let vals = std::slice::from_raw_parts(values, n).to_vec();
        let curve = check(MeasureCurve::new(MeasureKind::PastDirect, grid, vals))?;
        let anchor = Anchor {
            t: anchor_t,
            cdf: anchor_cdf,
        };
        let inner = check(reconstruct_cdf(
            &curve,
            anchor,
            &ReconstructConfig::default(),
        ))?;
        write_out(
            out,
            Box::into_raw(Box::new(PastentReconstruction { inner })),
            "out",
        )
    })
}

/// # Safety
/// `r` must come from `pastent_reconstruct` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruction_free(r: *mut PastentReconstruction) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of grid points, 0 for NULL.
///
/// # Safety
/// `r` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruction_len(r: *const PastentReconstruction) -> usize {
    r.as_ref().map_or(0, |r| r.inner.grid.len())
}

/// Row `i` of the reconstruction. Any out-pointer may be NULL.
///
/// # Safety
/// `r` must be valid; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruction_row(
    r: *const PastentReconstruction,
    i: usize,
    t: *mut f64,
    phi: *mut f64,
    cdf: *mut f64,
) -> PastentStatus {
    guard(|| {
        let r = &deref(r, "reconstruction")?.inner;
        if i >= r.grid.len() {
            set_last_error(format!("row {i} out of range 0..{}", r.grid.len()));
            return Err(PastentStatus::Domain);
        }
        for (p, v) in [(t, r.grid[i]), (phi, r.phi[i]), (cdf, r.cdf[i])] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Largest self-check residual, NaN for NULL.
///
/// # Safety
/// `r` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruction_selfcheck(r: *const PastentReconstruction) -> f64 {
    r.as_ref()
        .map_or(f64::NAN, |r| r.inner.max_selfcheck_residual)
}

/// Whether both hazard branches passed the anchor trial.
///
/// # Safety
/// `r` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pastent_reconstruction_branch_ambiguous(
    r: *const PastentReconstruction,
) -> bool {
    r.as_ref().is_some_and(|r| r.inner.branch_ambiguous)
}

/// Spacings estimate of the past entropy at `t`. `window` 0 picks the default.
///
/// # Safety
/// `values` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pastent_estimate_past_entropy(
    values: *const f64,
    n: usize,
    t: f64,
    window: usize,
    out: *mut f64,
) -> PastentStatus {
    guard(|| {
        if values.is_null() && n > 0 {
            return Err(null_error("values"));
        }
        let xs = if n == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(values, n).to_vec()
        };
        let sample = check(Sample::new(xs))?;
        let w = (window > 0).then_some(window);
        let v = check(past_entropy_estimate(&sample, t, w))?;
        write_out(out, v, "out")
    })
}
