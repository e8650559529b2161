//! Inverting past entropy: from a curve `t -> H(t)` back to the reversed
//! hazard rate and the distribution function, plus the single-point
//! uniqueness check and its empirical probe.
//!
//! Differentiating the past entropy gives
//!
//! ```text
//! H'(t) = phi(t) * (1 - H(t) - ln phi(t))
//! ```
//!
//! For fixed `H`, the right side `g(phi)` rises from 0 to its maximum
//! `e^{-H}` at `phi* = e^{-H}` and then falls through zero at `e^{1-H}`, so a
//! given slope has zero, one or two admissible `phi`.

use std::io::Write;

use serde::Serialize;

use crate::distributions::{Distribution, FamilyTag};
use crate::error::{Error, Result};
use crate::measures::{fmt_full, past_entropy_direct, past_entropy_pit, MeasureCurve, MeasureKind};
use crate::numerics::{find_root, integrate, QuadratureConfig, RootConfig};

/// Relative band around `e^{-H}` inside which a slope counts as tangent.
pub const TANGENT_REL_TOL: f64 = 1e-8;

/// Points on (0, t0] used for the conclusion distance.
pub const CONCLUSION_GRID_POINTS: usize = 256;

/// `phi * (1 - hbar - ln phi)`.
pub fn ode_rhs(hbar: f64, phi: f64) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(Error::Domain(format!(
            "reversed hazard must be > 0, got {phi}"
        )));
    }
    Ok(phi * (1.0 - hbar - phi.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NoRoot,
    Tangent,
    TwoRoots,
    SingleRootNonpositiveSlope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSolveOutcome {
    /// Candidate reversed hazard values, ascending.
    pub roots: Vec<f64>,
    pub regime: Regime,
    /// `|g(root) - hprime|` for each root.
    pub residuals: Vec<f64>,
}

impl RootSolveOutcome {
    fn from_roots(regime: Regime, roots: Vec<f64>, hbar: f64, hprime: f64) -> Self {
        let residuals = roots
            .iter()
            .map(|&r| (r * (1.0 - hbar - r.ln()) - hprime).abs())
            .collect();
        Self {
            roots,
            regime,
            residuals,
        }
    }
}

/// Solves `phi (1 - hbar - ln phi) = hprime` for `phi > 0`.
///
/// The search runs in `y = ln phi`, which keeps brackets well scaled over
/// many decades of `phi`.
pub fn solve_reversed_hazard(hbar: f64, hprime: f64, cfg: &RootConfig) -> Result<RootSolveOutcome> {
    cfg.validate()?;
    if !(hbar.is_finite() && hprime.is_finite()) {
        return Err(Error::Domain(format!(
            "entropy and slope must be finite, got ({hbar}, {hprime})"
        )));
    }
    let peak = (-hbar).exp();
    let g = |y: f64| y.exp() * (1.0 - hbar - y) - hprime;
    let y_peak = -hbar;
    let y_zero = 1.0 - hbar;

    if (hprime - peak).abs() <= TANGENT_REL_TOL * peak {
        return Ok(RootSolveOutcome::from_roots(
            Regime::Tangent,
            vec![peak],
            hbar,
            hprime,
        ));
    }
    if hprime > peak {
        return Ok(RootSolveOutcome::from_roots(
            Regime::NoRoot,
            vec![],
            hbar,
            hprime,
        ));
    }
    if hprime > 0.0 {
        let mut step = 1.0;
        let mut y_lo = y_peak - step;
        while g(y_lo) >= 0.0 {
            step *= 2.0;
            y_lo = y_peak - step;
            if !y_lo.is_finite() {
                return Err(Error::Bracket {
                    lo: y_lo,
                    hi: y_peak,
                });
            }
        }
        let lower = find_root(g, y_lo, y_peak, cfg)?.exp();
        let upper = find_root(g, y_peak, y_zero, cfg)?.exp();
        return Ok(RootSolveOutcome::from_roots(
            Regime::TwoRoots,
            vec![lower, upper],
            hbar,
            hprime,
        ));
    }
    let root = if hprime == 0.0 {
        y_zero
    } else {
        let mut step = 1.0;
        let mut y_hi = y_zero + step;
        while g(y_hi) > 0.0 {
            step *= 2.0;
            y_hi = y_zero + step;
            if !y_hi.is_finite() {
                return Err(Error::Bracket {
                    lo: y_zero,
                    hi: y_hi,
                });
            }
        }
        find_root(g, y_zero, y_hi, cfg)?
    };
    Ok(RootSolveOutcome::from_roots(
        Regime::SingleRootNonpositiveSlope,
        vec![root.exp()],
        hbar,
        hprime,
    ))
}

/// Known value of the distribution function at one grid time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    pub t: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructConfig {
    pub root: RootConfig,
    /// A point whose estimated slope exceeds the tangency maximum by at most
    /// this relative amount is projected onto the tangency instead of being
    /// rejected. Finite differences of a curve lying on the tangency land on
    /// either side of it.
    pub tangent_slack: f64,
    /// Maximum re-integration mismatch for an anchor branch to pass the
    /// self-consistency trial.
    pub trial_tol: f64,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            root: RootConfig::default(),
            tangent_slack: 1e-2,
            trial_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub cdf: Vec<f64>,
    pub anchor: Anchor,
    pub branch_switches: usize,
    pub max_selfcheck_residual: f64,
    /// Both anchor branches passed the self-consistency trial; the
    /// descending one was kept.
    pub branch_ambiguous: bool,
    /// Points whose slope overshot the tangency and were projected onto it.
    pub projected_points: usize,
}

impl ReconstructionResult {
    /// Writes the `t,phi,cdf` CSV with 17 significant digits per number.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "phi", "cdf"])?;
        for i in 0..self.grid.len() {
            w.write_record([
                fmt_full(self.grid[i]),
                fmt_full(self.phi[i]),
                fmt_full(self.cdf[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Second-order derivative estimate on a possibly uneven grid: three-point
/// central stencils inside, three-point one-sided stencils at both ends.
pub fn grid_derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 3 || y.len() != n {
        return Err(Error::Precondition(format!(
            "derivative needs at least 3 matching points, got {n} times and {} values",
            y.len()
        )));
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = t[i] - t[i - 1];
        let h2 = t[i + 1] - t[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1]
            + (h2 - h1) / (h1 * h2) * y[i]
            + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
        - h1 / (h2 * (h1 + h2)) * y[2];
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
        + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y[n - 1];
    Ok(d)
}

fn nearest_root(roots: &[f64], prev: f64) -> f64 {
    roots
        .iter()
        .copied()
        .min_by(|a, b| (a / prev).ln().abs().total_cmp(&(b / prev).ln().abs()))
        .expect("at least one root")
}

/// Heun re-integration of `H' = ode_rhs(H, phi)` outward from `start`,
/// seeded with the input value there. Only indices in `range` are filled.
fn reintegrate(
    t: &[f64],
    h_in: &[f64],
    phi: &[f64],
    start: usize,
    lo: usize,
    hi: usize,
) -> Vec<f64> {
    let rhs = |h: f64, p: f64| p * (1.0 - h - p.ln());
    let mut h = vec![f64::NAN; t.len()];
    h[start] = h_in[start];
    for i in start + 1..=hi {
        let dt = t[i] - t[i - 1];
        let k1 = rhs(h[i - 1], phi[i - 1]);
        let k2 = rhs(h[i - 1] + dt * k1, phi[i]);
        h[i] = h[i - 1] + 0.5 * dt * (k1 + k2);
    }
    for i in (lo..start).rev() {
        let dt = t[i] - t[i + 1];
        let k1 = rhs(h[i + 1], phi[i + 1]);
        let k2 = rhs(h[i + 1] + dt * k1, phi[i]);
        h[i] = h[i + 1] + 0.5 * dt * (k1 + k2);
    }
    h
}

/// Continues the branch fixed at `start` with `phi_start` by nearest-root
/// selection over `lo..=hi`.
fn continue_branch(
    roots: &[Vec<f64>],
    start: usize,
    phi_start: f64,
    lo: usize,
    hi: usize,
) -> Vec<f64> {
    let mut phi = vec![f64::NAN; roots.len()];
    phi[start] = phi_start;
    for i in start + 1..=hi {
        phi[i] = nearest_root(&roots[i], phi[i - 1]);
    }
    for i in (lo..start).rev() {
        phi[i] = nearest_root(&roots[i], phi[i + 1]);
    }
    phi
}

/// Recovers the reversed hazard rate and the distribution function from a
/// sampled past-entropy curve and one known value of `F`.
///
/// The slope is estimated on the grid, each point is inverted with
/// [`solve_reversed_hazard`], and `ln F` is accumulated from the anchor by the
/// trapezoidal rule on `phi`. When the anchor admits two roots, both are
/// carried three steps each way and re-integrated; a branch whose
/// re-integrated entropy strays from the input by more than `trial_tol` is
/// dropped. If both survive, the descending branch (`phi > e^{-H}`) is kept
/// and the result is flagged ambiguous. Further points follow the root
/// nearest the previous one.
pub fn reconstruct_cdf(
    curve: &MeasureCurve,
    anchor: Anchor,
    cfg: &ReconstructConfig,
) -> Result<ReconstructionResult> {
    if !matches!(
        curve.kind(),
        MeasureKind::PastDirect | MeasureKind::PastPit | MeasureKind::PastCondexp
    ) {
        return Err(Error::Precondition(format!(
            "reconstruction needs a past-entropy curve, got {}",
            curve.kind()
        )));
    }
    let n = curve.len();
    if n < 5 {
        return Err(Error::Precondition(format!(
            "curve needs at least 5 points, got {n}"
        )));
    }
    if !(anchor.cdf > 0.0 && anchor.cdf <= 1.0) {
        return Err(Error::Precondition(format!(
            "anchor probability must lie in (0, 1], got {}",
            anchor.cdf
        )));
    }
    let t = curve.grid();
    let h_in = curve.values();
    let a = t
        .iter()
        .position(|&x| (x - anchor.t).abs() <= 1e-12 * x.abs().max(1.0))
        .ok_or_else(|| {
            Error::Precondition(format!("anchor time {} is not on the grid", anchor.t))
        })?;

    let slope = grid_derivative(t, h_in)?;
    let mut roots = Vec::with_capacity(n);
    let mut regimes = Vec::with_capacity(n);
    let mut projected_points = 0;
    for i in 0..n {
        let out =
            solve_reversed_hazard(h_in[i], slope[i], &cfg.root).map_err(|e| Error::at(t[i], e))?;
        if out.regime == Regime::NoRoot {
            let peak = (-h_in[i]).exp();
            if slope[i] - peak <= cfg.tangent_slack * peak {
                projected_points += 1;
                roots.push(vec![peak]);
                regimes.push(Regime::Tangent);
                continue;
            }
            return Err(Error::InconsistentCurve { t: t[i] });
        }
        roots.push(out.roots);
        regimes.push(out.regime);
    }

    let mut branch_ambiguous = false;
    let phi_anchor = if roots[a].len() == 1 {
        roots[a][0]
    } else {
        let lo = a.saturating_sub(3);
        let hi = (a + 3).min(n - 1);
        let mismatch: Vec<f64> = roots[a]
            .iter()
            .map(|&r| {
                let phi = continue_branch(&roots, a, r, lo, hi);
                let h = reintegrate(t, h_in, &phi, a, lo, hi);
                (lo..=hi)
                    .map(|i| (h[i] - h_in[i]).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let pass: Vec<bool> = mismatch.iter().map(|&m| m <= cfg.trial_tol).collect();
        match (pass[0], pass[1]) {
            (true, false) => roots[a][0],
            (false, true) => roots[a][1],
            (true, true) => {
                branch_ambiguous = true;
                roots[a][1]
            }
            (false, false) => {
                if mismatch[0] < mismatch[1] {
                    roots[a][0]
                } else {
                    roots[a][1]
                }
            }
        }
    };

    let phi = continue_branch(&roots, a, phi_anchor, 0, n - 1);
    let branch_switches = regimes.windows(2).filter(|w| w[0] != w[1]).count();

    let h_re = reintegrate(t, h_in, &phi, a, 0, n - 1);
    let max_selfcheck_residual = h_re
        .iter()
        .zip(h_in)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut ln_cdf = vec![0.0; n];
    ln_cdf[a] = anchor.cdf.ln();
    for i in a + 1..n {
        ln_cdf[i] = ln_cdf[i - 1] + 0.5 * (t[i] - t[i - 1]) * (phi[i] + phi[i - 1]);
    }
    for i in (0..a).rev() {
        ln_cdf[i] = ln_cdf[i + 1] - 0.5 * (t[i + 1] - t[i]) * (phi[i] + phi[i + 1]);
    }
    let mut cdf: Vec<f64> = ln_cdf.iter().map(|l| l.exp()).collect();
    cdf[a] = anchor.cdf;

    if let Some(i) = cdf.iter().position(|&c| !(c > 0.0 && c <= 1.0)) {
        return Err(Error::ReconstructionFailure(format!(
            "recovered F({}) = {} lies outside (0, 1]",
            t[i], cdf[i]
        )));
    }
    if let Some(w) = cdf.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::ReconstructionFailure(format!(
            "recovered F decreases between t = {} and t = {}",
            t[w],
            t[w + 1]
        )));
    }

    Ok(ReconstructionResult {
        grid: t.to_vec(),
        phi,
        cdf,
        anchor,
        branch_switches,
        max_selfcheck_residual,
        branch_ambiguous,
        projected_points,
    })
}

/// `int_0^v ln( f(F^-1(u)) / g(G^-1(u)) ) du`, signed.
pub fn mismatch_integral(
    x: &Distribution,
    y: &Distribution,
    v: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::Domain(format!(
            "upper limit must lie in (0, 1], got {v}"
        )));
    }
    if x == y {
        return Ok(0.0);
    }
    let r = integrate(
        |u| x.ln_pdf(x.quantile_unchecked(u)) - y.ln_pdf(y.quantile_unchecked(u)),
        0.0,
        v,
        cfg,
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PremisesFail,
    Consistent,
    CounterexampleCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub t0: f64,
    pub cdf_gap: f64,
    pub entropy_gap: f64,
    pub mismatch: f64,
    pub conclusion_distance: f64,
    pub verdict: Verdict,
}

/// Tests the single-point uniqueness claim on one pair of laws: if
/// `F(t0) = G(t0)` and the past entropies at `t0` agree, are `F` and `G`
/// equal on `(0, t0]`?
pub fn theorem_check(
    x: &Distribution,
    y: &Distribution,
    t0: f64,
    premise_tol: f64,
    separation_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<TheoremVerdict> {
    if !t0.is_finite() {
        return Err(Error::Domain(format!("t0 must be finite, got {t0}")));
    }
    for d in [x, y] {
        if t0 > d.support().upper {
            return Err(Error::Domain(format!(
                "t0 = {t0} lies outside the support of {d}"
            )));
        }
        if !(d.cdf(t0) > 0.0) {
            return Err(Error::Degenerate(format!("F(t0) = 0 for {d} at t0 = {t0}")));
        }
    }
    let fx = x.cdf(t0);
    let cdf_gap = (fx - y.cdf(t0)).abs();
    let entropy_gap = if x == y {
        0.0
    } else {
        (past_entropy_direct(x, t0, cfg)? - past_entropy_direct(y, t0, cfg)?).abs()
    };
    let mismatch = mismatch_integral(x, y, fx, cfg)?;
    let conclusion_distance = (1..=CONCLUSION_GRID_POINTS)
        .map(|i| {
            let t = t0 * i as f64 / CONCLUSION_GRID_POINTS as f64;
            (x.cdf(t) - y.cdf(t)).abs()
        })
        .fold(0.0, f64::max);
    let verdict = if cdf_gap > premise_tol || entropy_gap > premise_tol {
        Verdict::PremisesFail
    } else if conclusion_distance > separation_tol {
        Verdict::CounterexampleCandidate
    } else {
        Verdict::Consistent
    };
    Ok(TheoremVerdict {
        t0,
        cdf_gap,
        entropy_gap,
        mismatch,
        conclusion_distance,
        verdict,
    })
}

/// Evenly spaced sweep `lo, ..., hi` with `n` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ParamRange {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let name = name.into();
        if n == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::Precondition(format!(
                "range `{name}` needs finite lo <= hi and n >= 1, got {lo}:{hi}:{n}"
            )));
        }
        Ok(Self { name, lo, hi, n })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.lo * (1.0 - 1e-12) && v <= self.hi * (1.0 + 1e-12)
    }

    /// Parses `lo:hi:n`.
    pub fn parse_bounds(name: &str, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected lo:hi:n for `{name}`, got `{text}`"
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number `{s}` in range `{name}`")))
        };
        let n: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad count `{}` in range `{name}`", parts[2])))?;
        Self::new(name, num(parts[0])?, num(parts[1])?, n)
    }
}

/// Parses `name=lo:hi:n,name=lo:hi:n,...`.
pub fn parse_param_grid(text: &str) -> Result<Vec<ParamRange>> {
    text.split(',')
        .map(|item| {
            let (name, bounds) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected name=lo:hi:n, got `{item}`")))?;
            ParamRange::parse_bounds(name, bounds)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub premise_tol: f64,
    pub separation_tol: f64,
    pub quad: QuadratureConfig,
    pub root: RootConfig,
    /// Shape values scanned for sign changes when matching a partner.
    pub shape_scan: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            premise_tol: 1e-6,
            separation_tol: 1e-2,
            quad: QuadratureConfig::default(),
            root: RootConfig {
                x_tol: 1e-11,
                max_iter: 200,
            },
            shape_scan: 48,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeHit {
    pub dist_x: String,
    pub dist_y: String,
    #[serde(flatten)]
    pub verdict: TheoremVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub dist_x: String,
    pub t0: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Cells visited (X parameter combinations times t0 values).
    pub cells: usize,
    /// Partners that met both premises and were checked.
    pub pairs_checked: usize,
    pub errors: Vec<CellError>,
    /// Counterexample candidates, largest conclusion distance first.
    pub candidates: Vec<ProbeHit>,
}

/// Shape range searched for a partner when none is given.
fn default_shape_range(tag: FamilyTag) -> Option<ParamRange> {
    tag.shape_param().map(|name| ParamRange {
        name: name.to_string(),
        lo: 0.2,
        hi: 5.0,
        n: 2,
    })
}

/// Law of `tag` with unit scale and the given shape.
fn unit_member(tag: FamilyTag, shape: Option<f64>) -> Result<Distribution> {
    match tag {
        FamilyTag::Uniform => Distribution::uniform(1.0),
        FamilyTag::Exp => Distribution::exponential(1.0),
        FamilyTag::Weibull => Distribution::weibull(shape.unwrap_or(1.0), 1.0),
        FamilyTag::Power => Distribution::power(shape.unwrap_or(1.0), 1.0),
    }
}

/// `F^-1(v)` including `v = 1` on a bounded support.
fn quantile_closed(d: &Distribution, v: f64) -> Result<f64> {
    if v >= 1.0 && d.support().is_bounded() {
        Ok(d.support().upper)
    } else {
        d.quantile(v)
    }
}

/// Scale-free part of the past entropy at probability level `v`:
/// `H(F^-1(v)) - ln F^-1(v)` for the unit-scale member.
fn scale_free_past_entropy(unit: &Distribution, v: f64, quad: &QuadratureConfig) -> Result<f64> {
    let q = quantile_closed(unit, v)?;
    Ok(past_entropy_pit(unit, q, quad)? - q.ln())
}

/// Members of `tag` that satisfy both premises against `x` at `t0`:
/// `G(t0) = F(t0)` and equal past entropy at `t0`. Scaling `Y` by `a` moves
/// its past entropy by `ln a`, so the scale is pinned by the first premise
/// and only the shape has to be searched.
pub fn premise_matched_partners(
    x: &Distribution,
    tag: FamilyTag,
    t0: f64,
    shape_range: Option<&ParamRange>,
    cfg: &ProbeConfig,
) -> Result<Vec<Distribution>> {
    let v = x.cdf(t0);
    if !(v > 0.0) {
        return Err(Error::Degenerate(format!("F(t0) = 0 at t0 = {t0}")));
    }
    let member_at = |shape: Option<f64>| -> Result<Distribution> {
        let unit = unit_member(tag, shape)?;
        let q = quantile_closed(&unit, v)?;
        unit.scaled(t0 / q)
    };
    let Some(range) = shape_range else {
        return Ok(vec![member_at(None)?]);
    };
    let target = past_entropy_direct(x, t0, &cfg.quad)? - t0.ln();
    let mismatch = |s: f64| -> Result<f64> {
        Ok(scale_free_past_entropy(&unit_member(tag, Some(s))?, v, &cfg.quad)? - target)
    };
    let scan = ParamRange::new(
        range.name.clone(),
        range.lo,
        range.hi,
        cfg.shape_scan.max(2),
    )?
    .values();
    let h = scan
        .iter()
        .map(|&s| mismatch(s))
        .collect::<Result<Vec<_>>>()?;

    let own_shape = if x.tag() == tag {
        Some(x.params()[0])
    } else {
        None
    };
    let mut shapes = Vec::new();
    for i in 0..scan.len() {
        if h[i] == 0.0 {
            shapes.push(scan[i]);
            continue;
        }
        if i + 1 < scan.len() && h[i + 1] != 0.0 && h[i].signum() != h[i + 1].signum() {
            let mut failure = None;
            let root = find_root(
                |s| match mismatch(s) {
                    Ok(val) => val,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                },
                scan[i],
                scan[i + 1],
                &cfg.root,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            shapes.push(root?);
        }
    }
    shapes
        .into_iter()
        .filter(|&s| own_shape.is_none_or(|own| (s - own).abs() > 1e-6 * own))
        .map(|s| member_at(Some(s)))
        .collect()
}

/// Sweeps `x` over the Cartesian grid of `x_params` and `t0_range`; for each
/// cell, every member of `family_y` meeting both premises is checked with
/// [`theorem_check`]. Per-cell failures are recorded and skipped.
///
/// `x_params` must cover every parameter of `family_x`. Entries named
/// `y.<param>` bound the partner's parameters instead; when the families
/// coincide, the partner inherits the ranges given for `x`.
pub fn uniqueness_probe(
    family_x: FamilyTag,
    family_y: FamilyTag,
    x_params: &[ParamRange],
    t0_range: &ParamRange,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    let find = |name: &str| x_params.iter().find(|r| r.name == name);
    for r in x_params {
        let known = match r.name.strip_prefix("y.") {
            Some(p) => family_y.param_names().contains(&p),
            None => family_x.param_names().contains(&r.name.as_str()),
        };
        if !known {
            return Err(Error::Precondition(format!(
                "unknown parameter `{}` for {family_x} x {family_y}",
                r.name
            )));
        }
    }
    let x_ranges = family_x
        .param_names()
        .iter()
        .map(|name| {
            find(name).ok_or_else(|| Error::Precondition(format!("missing range for `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let y_range = |name: &str| -> Option<ParamRange> {
        find(&format!("y.{name}"))
            .or_else(|| (family_x == family_y).then(|| find(name)).flatten())
            .cloned()
    };
    let y_shape = family_y.shape_param().map(|p| {
        y_range(p)
            .or_else(|| default_shape_range(family_y))
            .expect("shape range")
    });
    let y_bounds: Vec<(usize, ParamRange)> = family_y
        .param_names()
        .iter()
        .enumerate()
        .filter(|(_, p)| Some(**p) != family_y.shape_param())
        .filter_map(|(i, p)| y_range(p).map(|r| (i, r)))
        .collect();

    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for r in &x_ranges {
        let vals = r.values();
        combos = combos
            .into_iter()
            .flat_map(|c| {
                vals.iter().map(move |&v| {
                    let mut next = c.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }

    let mut report = ProbeReport {
        cells: 0,
        pairs_checked: 0,
        errors: Vec::new(),
        candidates: Vec::new(),
    };
    for params in &combos {
        let x = Distribution::from_params(family_x, params)?;
        for t0 in t0_range.values() {
            report.cells += 1;
            let mut cell = || -> Result<Vec<ProbeHit>> {
                if t0 > x.support().upper {
                    return Err(Error::Domain(format!(
                        "t0 = {t0} beyond the support of {x}"
                    )));
                }
                let mut hits = Vec::new();
                for y in premise_matched_partners(&x, family_y, t0, y_shape.as_ref(), cfg)? {
                    let yp = y.params();
                    if !y_bounds.iter().all(|(i, r)| r.contains(yp[*i])) {
                        continue;
                    }
                    report.pairs_checked += 1;
                    let verdict =
                        theorem_check(&x, &y, t0, cfg.premise_tol, cfg.separation_tol, &cfg.quad)?;
                    if verdict.verdict == Verdict::CounterexampleCandidate {
                        hits.push(ProbeHit {
                            dist_x: x.to_string(),
                            dist_y: y.to_string(),
                            verdict,
                        });
                    }
                }
                Ok(hits)
            };
            match cell() {
                Ok(hits) => report.candidates.extend(hits),
                Err(e) => report.errors.push(CellError {
                    dist_x: x.to_string(),
                    t0,
                    message: e.to_string(),
                }),
            }
        }
    }
    report.candidates.sort_by(|a, b| {
        b.verdict
            .conclusion_distance
            .total_cmp(&a.verdict.conclusion_distance)
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{measure_curve, MeasureKind};

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn ode_rhs_examples() {
        // Uniform: hbar = ln t, phi = 1/t, slope 1/t.
        for t in [0.2, 0.5, 0.9] {
            assert!((ode_rhs(f64::ln(t), 1.0 / t).unwrap() - 1.0 / t).abs() < 1e-14);
        }
        let h = 0.3;
        assert!(ode_rhs(h, (1.0 - h).exp()).unwrap().abs() < 1e-15);
        assert_eq!(ode_rhs(0.0, 1.0).unwrap(), 1.0);
        assert!(ode_rhs(0.0, 0.0).is_err());
    }

    #[test]
    fn root_regimes() {
        let cfg = RootConfig::default();
        let tangent = solve_reversed_hazard(0.0, 1.0, &cfg).unwrap();
        assert_eq!(tangent.regime, Regime::Tangent);
        assert!((tangent.roots[0] - 1.0).abs() < 1e-12);

        let single = solve_reversed_hazard(0.0, 0.0, &cfg).unwrap();
        assert_eq!(single.regime, Regime::SingleRootNonpositiveSlope);
        assert!((single.roots[0] - std::f64::consts::E).abs() < 1e-12);

        let none = solve_reversed_hazard(0.0, 2.0, &cfg).unwrap();
        assert_eq!(none.regime, Regime::NoRoot);
        assert!(none.roots.is_empty());

        let two = solve_reversed_hazard(0.0, 0.5, &cfg).unwrap();
        assert_eq!(two.regime, Regime::TwoRoots);
        assert!(two.roots[0] < 1.0 && two.roots[1] > 1.0);
        assert!(two.residuals.iter().all(|&r| r < 1e-10));

        let negative = solve_reversed_hazard(0.5, -3.0, &cfg).unwrap();
        assert_eq!(negative.regime, Regime::SingleRootNonpositiveSlope);
        assert!(negative.residuals[0] < 1e-9);
    }

    #[test]
    fn roots_span_many_decades() {
        let cfg = RootConfig::default();
        for hbar in [-8.0, 0.0, 12.0] {
            let peak = f64::exp(-hbar);
            let out = solve_reversed_hazard(hbar, 1e-3 * peak, &cfg).unwrap();
            for (r, res) in out.roots.iter().zip(&out.residuals) {
                assert!(*res <= 1e-9 * peak, "hbar {hbar}: root {r} residual {res}");
            }
        }
    }

    #[test]
    fn grid_derivative_exact_on_quadratics() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.6, 1.0];
        let y: Vec<f64> = t.iter().map(|x| 3.0 * x * x - 2.0 * x + 1.0).collect();
        let d = grid_derivative(&t, &y).unwrap();
        for (x, dy) in t.iter().zip(d) {
            assert!((dy - (6.0 * x - 2.0)).abs() < 1e-12, "{x}: {dy}");
        }
        assert!(grid_derivative(&t[..2], &y[..2]).is_err());
    }

    #[test]
    fn reconstruct_power_round_trip() {
        let d = Distribution::power(2.0, 1.0).unwrap();
        let curve = measure_curve(&d, MeasureKind::PastDirect, 0.1, 0.99, 200, &quad()).unwrap();
        let anchor = Anchor {
            t: 0.99,
            cdf: 0.99 * 0.99,
        };
        let r = reconstruct_cdf(&curve, anchor, &ReconstructConfig::default()).unwrap();
        let err = r
            .grid
            .iter()
            .zip(&r.cdf)
            .map(|(t, f)| (f - t * t).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
        assert!(r.max_selfcheck_residual <= 1e-3);
    }

    #[test]
    fn reconstruct_preconditions() {
        let d = Distribution::uniform(1.0).unwrap();
        let two = measure_curve(&d, MeasureKind::PastDirect, 0.2, 0.9, 2, &quad()).unwrap();
        let anchor = Anchor { t: 0.9, cdf: 0.9 };
        assert!(matches!(
            reconstruct_cdf(&two, anchor, &ReconstructConfig::default()),
            Err(Error::Precondition(_))
        ));
        let curve = measure_curve(&d, MeasureKind::PastDirect, 0.2, 0.9, 20, &quad()).unwrap();
        let off_grid = Anchor {
            t: 0.55555,
            cdf: 0.5,
        };
        assert!(reconstruct_cdf(&curve, off_grid, &ReconstructConfig::default()).is_err());
        let shannon = measure_curve(&d, MeasureKind::Residual, 0.2, 0.9, 20, &quad()).unwrap();
        assert!(reconstruct_cdf(&shannon, anchor, &ReconstructConfig::default()).is_err());
    }

    #[test]
    fn inconsistent_curve_is_rejected() {
        // Slope far above e^{-hbar} everywhere: no reversed hazard fits.
        let grid: Vec<f64> = (0..20).map(|i| 0.1 + 0.05 * i as f64).collect();
        let values: Vec<f64> = grid.iter().map(|t| 50.0 * t).collect();
        let curve = MeasureCurve::new(MeasureKind::PastDirect, grid.clone(), values).unwrap();
        let anchor = Anchor {
            t: grid[19],
            cdf: 0.9,
        };
        assert!(matches!(
            reconstruct_cdf(&curve, anchor, &ReconstructConfig::default()),
            Err(Error::InconsistentCurve { .. })
        ));
    }

    #[test]
    fn mismatch_examples() {
        let u = Distribution::uniform(1.0).unwrap();
        let p = Distribution::power(2.0, 1.0).unwrap();
        assert_eq!(mismatch_integral(&p, &p, 0.7, &quad()).unwrap(), 0.0);
        // int_0^1 ln(1 / (2 sqrt u)) du = 1/2 - ln 2, which is also H(Y) - H(X).
        let m = mismatch_integral(&u, &p, 1.0, &quad()).unwrap();
        assert!((m - (0.5 - 2f64.ln())).abs() < 1e-9, "{m}");
        let hx = past_entropy_direct(&u, 1.0, &quad()).unwrap();
        let hy = past_entropy_direct(&p, 1.0, &quad()).unwrap();
        assert!((m - (hy - hx)).abs() < 1e-9);
        // Oracle: int_0^v -ln 2 - ln(u)/2 du.
        let v = 1e-6;
        let m = mismatch_integral(&u, &p, v, &quad()).unwrap();
        let want = -v * 2f64.ln() - 0.5 * (v * v.ln() - v);
        assert!((m - want).abs() < 1e-12, "{m} vs {want}");
        assert!(mismatch_integral(&u, &p, 0.0, &quad()).is_err());
        assert!(mismatch_integral(&u, &p, 1.5, &quad()).is_err());
    }

    #[test]
    fn theorem_check_examples() {
        let e = Distribution::exponential(1.0).unwrap();
        let v = theorem_check(&e, &e, 1.0, 1e-6, 1e-2, &quad()).unwrap();
        assert_eq!(v.verdict, Verdict::Consistent);
        assert!(v.cdf_gap <= 1e-10 && v.entropy_gap <= 1e-10 && v.mismatch.abs() <= 1e-10);

        let u = Distribution::uniform(1.0).unwrap();
        let p = Distribution::power(2.0, 1.0).unwrap();
        let v = theorem_check(&u, &p, 1.0, 1e-6, 1e-2, &quad()).unwrap();
        assert_eq!(v.verdict, Verdict::PremisesFail);
        assert!((v.entropy_gap - (2f64.ln() - 0.5)).abs() < 1e-8);

        assert!(theorem_check(&u, &p, 1.5, 1e-6, 1e-2, &quad()).is_err());
    }

    #[test]
    fn power_counterexample() {
        // psi(c) = 1 - 1/c - ln c takes the value psi(0.5) again at c2 > 1.
        let psi = |c: f64| 1.0 - 1.0 / c - c.ln();
        let target = psi(0.5);
        let c2 = find_root(|c| psi(c) - target, 1.0, 10.0, &RootConfig::default()).unwrap();
        let t0: f64 = 0.5;
        let b2 = t0 / t0.powf(0.5 / c2);
        let x = Distribution::power(0.5, 1.0).unwrap();
        let y = Distribution::power(c2, b2).unwrap();
        let v = theorem_check(&x, &y, t0, 1e-6, 1e-2, &quad()).unwrap();
        assert_eq!(v.verdict, Verdict::CounterexampleCandidate, "{v:?}");
        assert!(v.conclusion_distance > 0.01);

        let found = premise_matched_partners(
            &x,
            FamilyTag::Power,
            t0,
            Some(&ParamRange::new("c", 0.3, 3.0, 28).unwrap()),
            &ProbeConfig::default(),
        )
        .unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].params()[0] - c2).abs() < 1e-8);
        assert!((found[0].params()[1] - b2).abs() < 1e-8);
    }

    #[test]
    fn exponential_probe_is_empty() {
        let params = parse_param_grid("rate=0.5:2:8").unwrap();
        let t0 = ParamRange::parse_bounds("t0", "0.5:2:8").unwrap();
        let r = uniqueness_probe(
            FamilyTag::Exp,
            FamilyTag::Exp,
            &params,
            &t0,
            &ProbeConfig::default(),
        )
        .unwrap();
        assert_eq!(r.cells, 64);
        assert!(r.candidates.is_empty());
        assert!(r.errors.is_empty());
    }

    #[test]
    fn probe_grid_errors() {
        let t0 = ParamRange::parse_bounds("t0", "0.5:2:4").unwrap();
        let cfg = ProbeConfig::default();
        assert!(matches!(
            uniqueness_probe(FamilyTag::Exp, FamilyTag::Exp, &[], &t0, &cfg),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            ParamRange::parse_bounds("t0", "0.5:2:0"),
            Err(Error::Precondition(_))
        ));
        assert!(parse_param_grid("rate=1:2").is_err());
        assert!(parse_param_grid("rate").is_err());
        let wrong = parse_param_grid("shape=1:2:3").unwrap();
        assert!(uniqueness_probe(FamilyTag::Exp, FamilyTag::Exp, &wrong, &t0, &cfg).is_err());
    }

    #[test]
    fn param_range_values() {
        let r = ParamRange::new("c", 0.3, 3.0, 28).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 28);
        assert_eq!(v[0], 0.3);
        assert_eq!(v[27], 3.0);
        assert_eq!(
            ParamRange::new("c", 2.0, 2.0, 1).unwrap().values(),
            vec![2.0]
        );
    }
}
