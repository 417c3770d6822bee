use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// A parameter lies outside the domain an operation is defined on.
    #[error("parameter domain error: {0}")]
    Domain(String),

    /// A theorem or lemma hypothesis is not satisfied by the input.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// An adaptive numerical routine did not reach its target.
    #[error("numerical routine did not converge: {what} (achieved {achieved:.3e}, target {target:.3e})")]
    Numeric {
        what: String,
        achieved: f64,
        target: f64,
    },

    /// The input hits a genuine singularity of the formula, e.g. `|x|^(r-2)` at `x = 0`.
    #[error("singular input: {0}")]
    Singular(String),

    /// A perturbation collapsed onto the tangent space of the extremal manifold.
    #[error("degenerate perturbation: {0}")]
    Degenerate(String),

    /// A sampled constant estimate came out non-positive.
    #[error("constant estimation failed: {0}")]
    Estimation(String),

    /// A family sweep or fit could not produce a result.
    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Self::Hypothesis(msg.into())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
