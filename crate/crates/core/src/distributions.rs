//! Parametric lifetime distributions with closed-form density, distribution
//! function and quantile.
//!
//! Four families are supported. Each has a closed-form quantile so that every
//! entropy functional can be cross-checked in both x-space and u-space.
//!
//! | family          | text spec                     | support      | F(x)                  |
//! |-----------------|-------------------------------|--------------|-----------------------|
//! | uniform         | `uniform:b=<f>`               | [0, b]       | x / b                 |
//! | exponential     | `exp:rate=<f>`                | [0, inf)     | 1 - exp(-rate x)      |
//! | Weibull         | `weibull:shape=<f>,scale=<f>` | [0, inf)     | 1 - exp(-(x/scale)^k) |
//! | power function  | `power:c=<f>,b=<f>`           | [0, b]       | (x / b)^c             |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Support of a lifetime law. `upper` is `f64::INFINITY` for unbounded laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    /// Open interior `(lower, upper)`.
    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

/// Family tag, used by the CLI and the uniqueness probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Uniform,
    Exp,
    Weibull,
    Power,
}

impl FamilyTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::Uniform => "uniform",
            FamilyTag::Exp => "exp",
            FamilyTag::Weibull => "weibull",
            FamilyTag::Power => "power",
        }
    }

    /// Parameter names in the order accepted by [`Distribution::from_params`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilyTag::Uniform => &["b"],
            FamilyTag::Exp => &["rate"],
            FamilyTag::Weibull => &["shape", "scale"],
            FamilyTag::Power => &["c", "b"],
        }
    }

    /// Name of the shape parameter, if the family has one.
    pub fn shape_param(&self) -> Option<&'static str> {
        match self {
            FamilyTag::Uniform | FamilyTag::Exp => None,
            FamilyTag::Weibull => Some("shape"),
            FamilyTag::Power => Some("c"),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(FamilyTag::Uniform),
            "exp" => Ok(FamilyTag::Exp),
            "weibull" => Ok(FamilyTag::Weibull),
            "power" => Ok(FamilyTag::Power),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Uniform on `[0, b]`.
    Uniform { b: f64 },
    /// Exponential with rate `rate`.
    Exponential { rate: f64 },
    /// Weibull with shape `shape` (k) and scale `scale`.
    Weibull { shape: f64, scale: f64 },
    /// Power function law on `[0, b]` with `F(x) = (x/b)^c`.
    PowerFunction { c: f64, b: f64 },
}

/// An absolutely continuous lifetime law.
///
/// Construct through the checked constructors; every parameter must be finite
/// and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distribution {
    family: Family,
}

fn check_param(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl Distribution {
    pub fn uniform(b: f64) -> Result<Self> {
        check_param("b", b)?;
        Ok(Self {
            family: Family::Uniform { b },
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check_param("rate", rate)?;
        Ok(Self {
            family: Family::Exponential { rate },
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        check_param("shape", shape)?;
        check_param("scale", scale)?;
        Ok(Self {
            family: Family::Weibull { shape, scale },
        })
    }

    pub fn power(c: f64, b: f64) -> Result<Self> {
        check_param("c", c)?;
        check_param("b", b)?;
        Ok(Self {
            family: Family::PowerFunction { c, b },
        })
    }

    /// Builds a member of `tag` from parameters listed in
    /// [`FamilyTag::param_names`] order.
    pub fn from_params(tag: FamilyTag, params: &[f64]) -> Result<Self> {
        let want = tag.param_names().len();
        if params.len() != want {
            return Err(Error::InvalidParameter(format!(
                "{tag} takes {want} parameter(s), got {}",
                params.len()
            )));
        }
        match tag {
            FamilyTag::Uniform => Self::uniform(params[0]),
            FamilyTag::Exp => Self::exponential(params[0]),
            FamilyTag::Weibull => Self::weibull(params[0], params[1]),
            FamilyTag::Power => Self::power(params[0], params[1]),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn tag(&self) -> FamilyTag {
        match self.family {
            Family::Uniform { .. } => FamilyTag::Uniform,
            Family::Exponential { .. } => FamilyTag::Exp,
            Family::Weibull { .. } => FamilyTag::Weibull,
            Family::PowerFunction { .. } => FamilyTag::Power,
        }
    }

    /// Parameters in [`FamilyTag::param_names`] order.
    pub fn params(&self) -> Vec<f64> {
        match self.family {
            Family::Uniform { b } => vec![b],
            Family::Exponential { rate } => vec![rate],
            Family::Weibull { shape, scale } => vec![shape, scale],
            Family::PowerFunction { c, b } => vec![c, b],
        }
    }

    pub fn support(&self) -> Support {
        let upper = match self.family {
            Family::Uniform { b } | Family::PowerFunction { b, .. } => b,
            Family::Exponential { .. } | Family::Weibull { .. } => f64::INFINITY,
        };
        Support { lower: 0.0, upper }
    }

    /// Density `f(x)`; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        let lf = self.ln_pdf(x);
        if lf == f64::NEG_INFINITY {
            0.0
        } else {
            lf.exp()
        }
    }

    /// `ln f(x)`; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Uniform { b } => {
                if x > b {
                    f64::NEG_INFINITY
                } else {
                    -b.ln()
                }
            }
            Family::Exponential { rate } => rate.ln() - rate * x,
            Family::Weibull { shape, scale } => {
                let z = x / scale;
                let pow_term = if shape == 1.0 {
                    0.0
                } else {
                    (shape - 1.0) * z.ln()
                };
                shape.ln() - scale.ln() + pow_term - z.powf(shape)
            }
            Family::PowerFunction { c, b } => {
                if x > b {
                    f64::NEG_INFINITY
                } else {
                    let pow_term = if c == 1.0 { 0.0 } else { (c - 1.0) * x.ln() };
                    c.ln() + pow_term - c * b.ln()
                }
            }
        }
    }

    /// Distribution function, clamped to 0 below and 1 above the support.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Uniform { b } => (x / b).min(1.0),
            Family::Exponential { rate } => -(-rate * x).exp_m1(),
            Family::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Family::PowerFunction { c, b } => {
                if x >= b {
                    1.0
                } else {
                    (x / b).powf(c)
                }
            }
        }
    }

    /// `ln F(x)`, accurate in the lower tail.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Uniform { b } => (x / b).min(1.0).ln(),
            Family::Exponential { rate } => (-(-rate * x).exp_m1()).ln(),
            Family::Weibull { shape, scale } => (-(-(x / scale).powf(shape)).exp_m1()).ln(),
            Family::PowerFunction { c, b } => {
                if x >= b {
                    0.0
                } else {
                    c * (x / b).ln()
                }
            }
        }
    }

    /// Survival function `1 - F(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `ln(1 - F(x))`, accurate in the upper tail.
    pub fn ln_survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Uniform { b } => {
                if x >= b {
                    f64::NEG_INFINITY
                } else {
                    (-x / b).ln_1p()
                }
            }
            Family::Exponential { rate } => -rate * x,
            Family::Weibull { shape, scale } => -(x / scale).powf(shape),
            Family::PowerFunction { c, b } => {
                if x >= b {
                    f64::NEG_INFINITY
                } else {
                    (-(c * (x / b).ln()).exp_m1()).ln()
                }
            }
        }
    }

    /// Closed-form inverse of the distribution function on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.family {
            Family::Uniform { b } => u * b,
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Family::PowerFunction { c, b } => b * u.powf(1.0 / c),
        }
    }

    /// Point beyond which the survival probability is `tail_mass`; the support
    /// end for bounded laws.
    pub fn tail_point(&self, tail_mass: f64) -> f64 {
        match self.family {
            Family::Uniform { b } | Family::PowerFunction { b, .. } => b,
            Family::Exponential { rate } => -tail_mass.ln() / rate,
            Family::Weibull { shape, scale } => scale * (-tail_mass.ln()).powf(1.0 / shape),
        }
    }

    /// Draws `n` values by inverse-transform sampling from a ChaCha8 stream
    /// seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let u: f64 = rng.gen();
            if u > 0.0 {
                out.push(self.quantile_unchecked(u));
            }
        }
        Ok(out)
    }

    /// Same family, every time unit stretched by `factor` (the law of `factor * X`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_param("scale factor", factor)?;
        match self.family {
            Family::Uniform { b } => Self::uniform(b * factor),
            Family::Exponential { rate } => Self::exponential(rate / factor),
            Family::Weibull { shape, scale } => Self::weibull(shape, scale * factor),
            Family::PowerFunction { c, b } => Self::power(c, b * factor),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = self.tag();
        write!(f, "{tag}:")?;
        for (i, (name, value)) in tag.param_names().iter().zip(self.params()).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Parses `family:name=value,...`; names may appear in any order, each
    /// exactly once, and whitespace is rejected.
    fn from_str(s: &str) -> Result<Self> {
        if s.chars().any(char::is_whitespace) {
            return Err(Error::Parse(format!(
                "whitespace in distribution spec `{s}`"
            )));
        }
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `family:params`, got `{s}`")))?;
        let tag: FamilyTag = family.parse()?;
        let names = tag.param_names();
        let mut values = vec![None; names.len()];
        for item in rest.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `name=value`, got `{item}`")))?;
            let idx = names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::Parse(format!("unknown parameter `{name}` for {tag}")))?;
            if values[idx].is_some() {
                return Err(Error::Parse(format!("parameter `{name}` given twice")));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{value}` for `{name}`")))?;
            values[idx] = Some(v);
        }
        let params = values
            .into_iter()
            .zip(names)
            .map(|(v, n)| {
                v.ok_or_else(|| Error::Parse(format!("missing parameter `{n}` for {tag}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_params(tag, &params)
    }
}
