use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0} requires a radially symmetric weight")]
    NotRadial(&'static str),

    #[error("bracket expansion for rho at ({x}, {y}) exceeded {iterations} iterations")]
    RhoBracket { x: f64, y: f64, iterations: usize },

    #[error("quadrature unresolved: {0}")]
    Quadrature(String),

    #[error("lattice repair exceeded its iteration cap with {} uncovered probe points", uncovered.len())]
    LatticeRepair { uncovered: Vec<(f64, f64)> },

    #[error("lattice invariant violated: {0}")]
    LatticeInvariant(String),

    #[error("partition of unity undefined at ({x}, {y}): no bump covers the point")]
    PartitionCoverage { x: f64, y: f64 },

    #[error("symbol `{0}` is not decomposable into angular modes")]
    NotModeDecomposable(String),

    #[error("Gram matrix has eigenvalue {0:e} below the positivity tolerance")]
    NotPositive(f64),

    #[error("kernel series tail {tail:e} exceeds {tolerance:e} of the partial sum")]
    KernelTail { tail: f64, tolerance: f64 },

    #[error("metric graph disconnected: {0}")]
    Disconnected(String),

    #[error("divergent radial integral: {0}")]
    DivergentIntegral(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
