use thiserror::Error;

/// Errors raised by the analytic and numerical routines.
///
/// Precondition violations are separated from numerical failures so callers
/// (the CLI in particular) can map them to different exit statuses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter regime violated: {0}")]
    RegimeViolation(String),
    #[error("not supercritical: q = {q} must exceed the critical exponent {critical}")]
    NotSupercritical { q: f64, critical: f64 },
    #[error("Lin-Ni condition violated: {0}")]
    LinNiConditionViolated(String),
    #[error("shot is not a Dirichlet solution")]
    NotDirichlet,
    #[error("bracket endpoints cannot be distinguished: {0}")]
    SameBehavior(String),
    #[error("no Dirichlet outcomes in the sweep")]
    EmptyDiagram,
    #[error("integration diverged: {0}")]
    Diverged(String),
    #[error("no root found before x = {limit}")]
    NoRootFound { limit: f64 },
    #[error("extended precision requested but the crate was built without the `extended` feature")]
    ExtendedUnavailable,
}

impl Error {
    /// True for failures of the numerics, as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverged(_) | Error::NoRootFound { .. } | Error::EmptyDiagram | Error::SameBehavior(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
