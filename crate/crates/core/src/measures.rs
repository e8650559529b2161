//! Entropy functionals of lifetime laws and the reversed hazard rate.
//!
//! Past entropy is available through three independent routes so each can
//! check the others:
//!
//! * `past_direct`: `-int_0^t (f/F(t)) ln(f/F(t)) dx` in x-space;
//! * `past_pit`: `ln F(t) - (1/F(t)) int_0^{F(t)} ln f(F^-1(u)) du`, in u-space
//!   after the probability integral transform;
//! * `past_condexp`: `1 - E[ln phi(X) | X < t]`, with `phi = f/F`.
//!
//! All logarithms are natural, so every value is in nats.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Shannon,
    Residual,
    PastDirect,
    PastPit,
    PastCondexp,
    ReversedHazard,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::Shannon,
        MeasureKind::Residual,
        MeasureKind::PastDirect,
        MeasureKind::PastPit,
        MeasureKind::PastCondexp,
        MeasureKind::ReversedHazard,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::Shannon => "shannon",
            MeasureKind::Residual => "residual",
            MeasureKind::PastDirect => "past_direct",
            MeasureKind::PastPit => "past_pit",
            MeasureKind::PastCondexp => "past_condexp",
            MeasureKind::ReversedHazard => "reversed_hazard",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown measure kind `{s}`")))
    }
}

/// Sampled values of one measure on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureCurve {
    kind: MeasureKind,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl MeasureCurve {
    pub fn new(kind: MeasureKind, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points but there are {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "curve contains non-finite entries".into(),
            ));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "curve grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { kind, grid, values })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Writes the `t,value` CSV with 17 significant digits per number.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            w.write_record([fmt_full(*t), fmt_full(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `t,value` CSV. The file does not record the measure kind, so
    /// the caller supplies it.
    pub fn read_csv<R: Read>(input: R, kind: MeasureKind) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(Error::Parse(format!(
                "expected header `t,value`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad number in row {}", i + 1)))
            };
            grid.push(parse(0)?);
            values.push(parse(1)?);
        }
        Self::new(kind, grid, values)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Upper integration limit: the support end, or the tail point where the
/// survival probability equals `tail_cut`.
fn upper_limit(dist: &Distribution, cfg: &QuadratureConfig) -> f64 {
    dist.tail_point(cfg.tail_cut)
}

/// `-p ln p` given `ln p`, with the `p = 0` limit.
fn neg_plogp(ln_p: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        0.0
    } else {
        -ln_p.exp() * ln_p
    }
}

/// Shannon (differential) entropy `-int f ln f`.
pub fn shannon_entropy(dist: &Distribution, cfg: &QuadratureConfig) -> Result<f64> {
    let s = dist.support();
    let hi = upper_limit(dist, cfg);
    let r = integrate(|x| neg_plogp(dist.ln_pdf(x)), s.lower, hi, cfg)?;
    Ok(r.value)
}

/// Entropy of the residual life `[X - t | X > t]`.
pub fn residual_entropy(dist: &Distribution, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    check_time(t)?;
    let s = dist.support();
    let lo = t.max(s.lower);
    let ln_surv = dist.ln_survival(lo);
    if !(ln_surv > cfg.tail_cut.ln()) {
        return Err(Error::Degenerate(format!(
            "survival probability at t = {t} is not above {}",
            cfg.tail_cut
        )));
    }
    let hi = upper_limit(dist, cfg);
    let r = integrate(|x| neg_plogp(dist.ln_pdf(x) - ln_surv), lo, hi, cfg)?;
    Ok(r.value)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() {
        Err(Error::Domain("t is NaN".into()))
    } else {
        Ok(())
    }
}

/// Common preconditions for the past-entropy routes. Returns `ln F(t)`.
fn past_preconditions(dist: &Distribution, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    check_time(t)?;
    let s = dist.support();
    if t > s.upper {
        return Err(Error::Domain(format!(
            "t = {t} lies beyond the support end {}",
            s.upper
        )));
    }
    let ln_f = dist.ln_cdf(t);
    if !(ln_f > cfg.tail_cut.ln()) {
        return Err(Error::Degenerate(format!(
            "F(t) at t = {t} is not above {}",
            cfg.tail_cut
        )));
    }
    Ok(ln_f)
}

/// Past entropy by direct x-space quadrature.
///
/// `t = +inf` on an unbounded support is answered with the Shannon entropy.
pub fn past_entropy_direct(dist: &Distribution, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if t == f64::INFINITY && !dist.support().is_bounded() {
        return shannon_entropy(dist, cfg);
    }
    let ln_ft = past_preconditions(dist, t, cfg)?;
    let r = integrate(
        |x| neg_plogp(dist.ln_pdf(x) - ln_ft),
        dist.support().lower,
        t,
        cfg,
    )?;
    Ok(r.value)
}

/// Past entropy through the probability integral transform, integrating
/// `ln f(F^-1(u))` over `(0, F(t))`.
pub fn past_entropy_pit(dist: &Distribution, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if t == f64::INFINITY && !dist.support().is_bounded() {
        return shannon_entropy(dist, cfg);
    }
    let ln_ft = past_preconditions(dist, t, cfg)?;
    let v = ln_ft.exp();
    let r = integrate(|u| dist.ln_pdf(dist.quantile_unchecked(u)), 0.0, v, cfg)?;
    Ok(ln_ft - r.value / v)
}

/// Past entropy as one minus the conditional mean of `ln phi(X)` given `X < t`.
pub fn past_entropy_condexp(dist: &Distribution, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if t == f64::INFINITY && !dist.support().is_bounded() {
        return shannon_entropy(dist, cfg);
    }
    let ln_ft = past_preconditions(dist, t, cfg)?;
    let r = integrate(
        |x| {
            let lf = dist.ln_pdf(x);
            if lf == f64::NEG_INFINITY {
                0.0
            } else {
                lf.exp() * (lf - dist.ln_cdf(x))
            }
        },
        dist.support().lower,
        t,
        cfg,
    )?;
    Ok(1.0 - r.value / ln_ft.exp())
}

/// Reversed hazard rate `phi(t) = f(t) / F(t)`.
pub fn reversed_hazard(dist: &Distribution, t: f64) -> Result<f64> {
    check_time(t)?;
    let s = dist.support();
    if t > s.upper {
        return Err(Error::Domain(format!(
            "t = {t} lies beyond the support end {}",
            s.upper
        )));
    }
    if dist.cdf(t) <= 0.0 {
        return Err(Error::Degenerate(format!("F(t) = 0 at t = {t}")));
    }
    Ok((dist.ln_pdf(t) - dist.ln_cdf(t)).exp())
}

/// Evaluates one measure at `t`. Shannon entropy ignores `t`.
pub fn evaluate(
    dist: &Distribution,
    kind: MeasureKind,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match kind {
        MeasureKind::Shannon => shannon_entropy(dist, cfg),
        MeasureKind::Residual => residual_entropy(dist, t, cfg),
        MeasureKind::PastDirect => past_entropy_direct(dist, t, cfg),
        MeasureKind::PastPit => past_entropy_pit(dist, t, cfg),
        MeasureKind::PastCondexp => past_entropy_condexp(dist, t, cfg),
        MeasureKind::ReversedHazard => reversed_hazard(dist, t),
    }
}

/// Evenly spaced grid of `points` values from `t_min` to `t_max`, both included.
pub fn uniform_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    let step = (t_max - t_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                t_max
            } else {
                t_min + step * i as f64
            }
        })
        .collect()
}

/// Samples `kind` on an evenly spaced grid over `[t_min, t_max]`.
pub fn measure_curve(
    dist: &Distribution,
    kind: MeasureKind,
    t_min: f64,
    t_max: f64,
    points: usize,
    cfg: &QuadratureConfig,
) -> Result<MeasureCurve> {
    let s = dist.support();
    if !(t_min > s.lower && t_min < t_max && t_max <= s.upper) {
        return Err(Error::Domain(format!(
            "need {} < t_min < t_max <= {}, got [{t_min}, {t_max}]",
            s.lower, s.upper
        )));
    }
    if points < 2 {
        return Err(Error::Domain(format!(
            "a curve needs at least 2 points, got {points}"
        )));
    }
    let grid = uniform_grid(t_min, t_max, points);
    let values = grid
        .iter()
        .map(|&t| evaluate(dist, kind, t, cfg).map_err(|e| Error::at(t, e)))
        .collect::<Result<Vec<_>>>()?;
    MeasureCurve::new(kind, grid, values)
}
