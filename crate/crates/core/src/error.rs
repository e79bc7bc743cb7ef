use thiserror::Error;

use crate::sav::Aux;

pub type Result<T, E = SavError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SavError {
    /// `E_X(u) + a_X` fell to (or below) the guard, so `r_X` is not real.
    #[error("radicand E_{which}(u) + a_{which} = {radicand:e} is not positive; increase a_{which}")]
    Domain { which: Aux, radicand: f64 },

    #[error("argument outside domain: {0}")]
    OutOfDomain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator I - alpha*D*L is singular for alpha = {alpha:e}")]
    SingularOperator { alpha: f64 },

    #[error("singular linear system: {detail}")]
    SingularMatrix { detail: String },

    #[error("extrapolation predictor needs u^(n-1) at step {step}")]
    MissingHistory { step: usize },

    #[error("problem does not provide a linear/nonlinear splitting u' = Au + g(u)")]
    SplittingUnavailable,

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("state became non-finite (solution blew up)")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<SavError>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl SavError {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            SavError::Step { .. } => self,
            other => SavError::Step {
                step,
                source: Box::new(other),
            },
        }
    }

    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            SavError::Domain { .. } => "domain",
            SavError::OutOfDomain(_) => "domain",
            SavError::DimensionMismatch { .. } => "dimension_mismatch",
            SavError::SingularOperator { .. } => "singular_operator",
            SavError::SingularMatrix { .. } => "singular_matrix",
            SavError::MissingHistory { .. } => "missing_history",
            SavError::SplittingUnavailable => "splitting_unavailable",
            SavError::NoConvergence { .. } => "no_convergence",
            SavError::NonFinite => "non_finite",
            SavError::Config(_) => "config",
            SavError::Step { source, .. } => source.kind(),
            SavError::Io(_) => "io",
        }
    }

    pub fn step(&self) -> Option<usize> {
        match self {
            SavError::Step { step, .. } => Some(*step),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SavError {
    fn from(e: std::io::Error) -> Self {
        SavError::Io(e.to_string())
    }
}
