use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes through [`Error::is_numerical`]:
/// numerical failures exit with 3, everything else with 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate condition: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: partial value {value}, error estimate {err_est:e}")]
    QuadratureAccuracy { value: f64, err_est: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("root refinement exhausted its iteration budget; best bracket [{lo}, {hi}]")]
    RootAccuracy { lo: f64, hi: f64 },

    #[error("curve is inconsistent with any reversed hazard rate at t = {t}")]
    InconsistentCurve { t: f64 },

    #[error("reconstruction failed: {0}")]
    ReconstructionFailure(String),

    #[error("insufficient data: {found} sample values at or below t, need at least {needed}")]
    InsufficientData { found: usize, needed: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("at t = {t}: {source}")]
    AtPoint { t: f64, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// bad input or unmet preconditions.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::QuadratureAccuracy { .. }
            | Error::Bracket { .. }
            | Error::RootAccuracy { .. }
            | Error::InconsistentCurve { .. }
            | Error::ReconstructionFailure(_) => true,
            Error::AtPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at(t: f64, source: Error) -> Error {
        Error::AtPoint {
            t,
            source: Box::new(source),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
