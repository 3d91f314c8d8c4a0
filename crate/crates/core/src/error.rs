use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FermiError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("numerical failure in {context}: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    NumericalFailure {
        context: String,
        estimate: f64,
        tolerance: f64,
    },

    #[error("point (tau={tau}, rho={rho}) is outside the chart (rho must stay below {limit})")]
    OutOfChart { tau: f64, rho: f64, limit: f64 },

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, FermiError>;

pub(crate) fn invalid(msg: impl Into<String>) -> FermiError {
    FermiError::InvalidArgument(msg.into())
}

impl FermiError {
    /// Short stable tag for tables and logs.
    pub fn kind(&self) -> &'static str {
        match self {
            FermiError::InvalidArgument(_) => "invalid",
            FermiError::SingularEvaluation(_) => "singular",
            FermiError::NumericalFailure { .. } => "numerical",
            FermiError::OutOfChart { .. } => "out_of_chart",
            FermiError::HypothesisViolation(_) => "hypothesis",
            FermiError::Divergence(_) => "divergence",
            FermiError::Domain(_) => "domain",
            FermiError::Bracket(_) => "bracket",
        }
    }

    /// True for failures of the numerics rather than of the mathematics:
    /// missed tolerances and lost root brackets.
    pub fn is_numerical(&self) -> bool {
        matches!(self, FermiError::NumericalFailure { .. } | FermiError::Bracket(_))
    }
}
