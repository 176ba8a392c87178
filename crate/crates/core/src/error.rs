use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("rejected input: {0}")]
    Rejected(String),
    #[error("singular metric: {0}")]
    Singular(String),
    #[error("foliation failure: {0}")]
    Foliation(String),
    #[error("flat spacetime: {0}")]
    Flat(String),
    #[error("integration failure: {0}")]
    Integration(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl GeomError {
    /// Short machine-readable tag used in reports.
    pub fn status(&self) -> &'static str {
        match self {
            GeomError::Domain(_) => "domain",
            GeomError::Rejected(_) => "rejected",
            GeomError::Singular(_) => "singular",
            GeomError::Foliation(_) => "foliation failure",
            GeomError::Flat(_) => "flat",
            GeomError::Integration(_) => "integration",
            GeomError::Parse(_) => "parse",
        }
    }
}
