//! Numerical kernels: adaptive quadrature, bracketed root refinement and
//! central differences.
//!
//! The quadrature never evaluates the integrand at an interval end. Each
//! panel is handled by a 21-point Gauss-Kronrod rule (all nodes interior),
//! and the interval is first mapped through a smooth sigmoidal substitution
//! that clusters nodes towards both ends. Integrands such as `f ln f` or
//! `ln F`, which diverge at a support end but stay integrable, converge
//! without special casing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Probability mass left out when an infinite upper limit is truncated.
    pub tail_cut: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 50,
            tail_cut: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_depth >= 1
            && self.tail_cut > 0.0
            && self.tail_cut <= 1e-6;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "quadrature config out of range: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RootConfig {
    pub x_tol: f64,
    pub max_iter: u32,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if self.x_tol > 0.0 && self.max_iter >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "root config out of range: {self:?}"
            )))
        }
    }
}

/// Result of a quadrature: the value and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_est: f64,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21),
// digits as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_185_598,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Sigmoidal map of `[0, 1]` onto itself with `w'(s) = 140 s^3 (1-s)^3`.
///
/// Returns `(w(s), 1 - w(s), w'(s))`; the complement is formed without
/// cancellation so points near either end keep full relative precision.
fn sigmoid(s: f64) -> (f64, f64, f64) {
    fn head(s: f64) -> f64 {
        // 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7
        s * s * s * s * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)))
    }
    let r = 1.0 - s;
    let jac = 140.0 * (s * r) * (s * r) * (s * r);
    if s <= 0.5 {
        let w = head(s);
        (w, 1.0 - w, jac)
    } else {
        let c = head(r);
        (1.0 - c, c, jac)
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Applies the Gauss-Kronrod pair to `g` on `[lo, hi]`. Returns the Kronrod
/// value and a QUADPACK-style error estimate.
fn gauss_kronrod<G: FnMut(f64) -> Result<f64>>(g: &mut G, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [0.0f64; 21];
    fv[10] = g(center)?;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = g(center - dx)?;
        fv[20 - j] = g(center + dx)?;
    }
    let mut res_k = WGK[10] * fv[10];
    let mut res_abs = WGK[10] * fv[10].abs();
    let mut res_g = 0.0;
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        res_k += WGK[j] * pair;
        res_abs += WGK[j] * (fv[j].abs() + fv[20 - j].abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fv[10] - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let h = half.abs();
    let value = res_k * half;
    res_abs *= h;
    res_asc *= h;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

// Hard cap on live panels, independent of depth.
const MAX_PANELS: usize = 20_000;

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Panels are bisected worst-first until the summed error estimate is at
/// most `max(abs_tol, rel_tol * |value|)`. Panels that reach `max_depth`
/// are frozen; if the tolerance is still unmet the partial value is
/// returned inside [`Error::QuadratureAccuracy`].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integrate needs finite limits, got [{a}, {b}]; use integrate_with_tail for infinite ones"
        )));
    }
    if !(a < b) {
        return Err(Error::Domain(format!(
            "integration limits must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let width = b - a;
    let inner_lo = a.next_up();
    let inner_hi = b.next_down();
    let mut g = |s: f64| -> Result<f64> {
        let (w, wc, jac) = sigmoid(s);
        if jac == 0.0 {
            return Ok(0.0);
        }
        let x = if w <= 0.5 {
            a + width * w
        } else {
            b - width * wc
        };
        let x = x.clamp(inner_lo, inner_hi);
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!(
                "integrand is not finite at x = {x} ({y})"
            )));
        }
        Ok(y * width * jac)
    };

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let initial = 4;
    for i in 0..initial {
        let lo = i as f64 / initial as f64;
        let hi = (i + 1) as f64 / initial as f64;
        let (value, err) = gauss_kronrod(&mut g, lo, hi)?;
        heap.push(Panel {
            lo,
            hi,
            value,
            err,
            depth: 1,
        });
    }

    loop {
        let (value, err) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if err <= tol {
            return Ok(Integral {
                value,
                err_est: err,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureAccuracy {
                value,
                err_est: err,
            });
        };
        if heap.len() + frozen.len() + 2 > MAX_PANELS {
            return Err(Error::QuadratureAccuracy {
                value,
                err_est: err,
            });
        }
        if worst.depth >= cfg.max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, err) = gauss_kronrod(&mut g, lo, hi)?;
            heap.push(Panel {
                lo,
                hi,
                value,
                err,
                depth: worst.depth + 1,
            });
        }
    }
}

/// Integrates `f` over `[a, inf)` by truncating where `tail_mass(x)` drops
/// below `cfg.tail_cut`. The cut point is found by doubling from `a`.
pub fn integrate_with_tail<F, T>(
    f: F,
    a: f64,
    tail_mass: T,
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    cfg.validate()?;
    let mut step = a.abs().max(1.0);
    let mut cut = a + step;
    for _ in 0..2048 {
        if tail_mass(cut) < cfg.tail_cut {
            return integrate(f, a, cut, cfg);
        }
        step *= 2.0;
        cut = a + step;
        if !cut.is_finite() {
            break;
        }
    }
    Err(Error::Domain(format!(
        "tail mass never fell below {} beyond {a}",
        cfg.tail_cut
    )))
}

/// Finds a zero of `g` in `[lo, hi]`.
///
/// Regula falsi steps are taken inside the bracket; a bisection step is
/// forced whenever the secant point leaves the open bracket or the previous
/// step failed to halve it. Stops when the bracket width is at most
/// `x_tol * max(1, |x|)` and returns the bracket end with the smaller
/// residual.
pub fn find_root<G: FnMut(f64) -> f64>(
    mut g: G,
    lo: f64,
    hi: f64,
    cfg: &RootConfig,
) -> Result<f64> {
    cfg.validate()?;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = g(a);
    let mut fb = g(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(format!(
            "function is NaN at a bracket end [{a}, {b}]"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    let mut force_bisect = false;
    for _ in 0..cfg.max_iter {
        let width = b - a;
        let mid = a + 0.5 * width;
        if width <= cfg.x_tol * mid.abs().max(1.0) {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mut x = b - fb * (b - a) / (fb - fa);
        if force_bisect || !(x > a && x < b) {
            x = mid;
        }
        let fx = g(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        force_bisect = b - a > 0.5 * width;
    }
    Err(Error::RootAccuracy { lo: a, hi: b })
}

/// Symmetric difference quotient `(f(t+h) - f(t-h)) / 2h`.
pub fn central_diff<F: FnMut(f64) -> Result<f64>>(mut f: F, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be > 0, got {h}")));
    }
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}

/// Step used for derivative checks of measure curves: `1e-4 * max(1, |t|)`.
pub fn ode_check_step(t: f64) -> f64 {
    1e-4 * t.abs().max(1.0)
}
