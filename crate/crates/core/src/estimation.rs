//! Sample-based past-entropy estimation.
//!
//! The law of `X` given `X <= t` has density `f / F(t)` on `(0, t]`, so its
//! differential entropy is the past entropy at `t`. It is estimated with a
//! Vasicek-type spacings estimator on the subsample at or below `t`.

use std::io::Read;

use crate::error::{Error, Result};

/// Fewest subsample values accepted by [`past_entropy_estimate`].
pub const MIN_CONDITIONAL_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "sample values must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Reads a single-column CSV with header `x`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.len() != 1 || &headers[0] != "x" {
            return Err(Error::Parse(
                "expected a single column with header `x`".into(),
            ));
        }
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let v = rec
                .get(0)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad number in row {}", i + 1)))?;
            values.push(v);
        }
        Self::new(values)
    }
}

/// Fraction of sample values at or below `x`.
pub fn empirical_cdf(sample: &Sample, x: f64) -> Result<f64> {
    if sample.n() == 0 {
        return Err(Error::Precondition(
            "empirical cdf of an empty sample".into(),
        ));
    }
    let count = sample.values.iter().filter(|&&v| v <= x).count();
    Ok(count as f64 / sample.n() as f64)
}

/// Spacings entropy estimate of `values` (any order):
/// `(1/k) sum_i ln( k/(2m) * (x_(i+m) - x_(i-m)) )` with order-statistic
/// indices clamped to `[1, k]`. `window = None` uses `m = floor(sqrt(k))`.
pub fn spacing_entropy(values: &[f64], window: Option<usize>) -> Result<f64> {
    let k = values.len();
    if k < 2 {
        return Err(Error::InsufficientData {
            found: k,
            needed: 2,
        });
    }
    let m = window.unwrap_or_else(|| (k as f64).sqrt().floor() as usize);
    if m == 0 || m >= k {
        return Err(Error::Precondition(format!(
            "window must lie in [1, {}], got {m}",
            k - 1
        )));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let scale = k as f64 / (2.0 * m as f64);
    let mut sum = 0.0;
    for i in 0..k {
        let hi = x[(i + m).min(k - 1)];
        let lo = x[i.saturating_sub(m)];
        let gap = hi - lo;
        if gap <= 0.0 {
            return Err(Error::DegenerateSample(format!(
                "zero spacing across the window around order statistic {}",
                i + 1
            )));
        }
        sum += (scale * gap).ln();
    }
    Ok(sum / k as f64)
}

/// Estimates the past entropy at `t` from the sample values at or below `t`.
pub fn past_entropy_estimate(sample: &Sample, t: f64, window: Option<usize>) -> Result<f64> {
    let below: Vec<f64> = sample.values.iter().copied().filter(|&v| v <= t).collect();
    if below.len() < MIN_CONDITIONAL_SAMPLE {
        return Err(Error::InsufficientData {
            found: below.len(),
            needed: MIN_CONDITIONAL_SAMPLE,
        });
    }
    spacing_entropy(&below, window)
}
