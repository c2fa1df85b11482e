use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

/// Errors surfaced by the operator algebra and the numerical routines.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("operator site counts differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("locality {locality} exceeds system size {n_sites}")]
    LocalityTooLarge { locality: usize, n_sites: usize },

    #[error("dense realization capped at {cap} sites, requested {n_sites}")]
    CapacityExceeded { n_sites: usize, cap: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not anti-Hermitian (max deviation {0:.3e})")]
    NotAntiHermitian(f64),

    #[error("operators commute: {0}")]
    CommutingPair(&'static str),

    #[error("operators do not commute (commutator HS norm {0:.3e}); use the shared-subspace path")]
    NonCommutingPair(f64),

    #[error("simulator ansatz has no generators")]
    EmptyAnsatz,

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("correlation block of the higher-locality generators is singular (min |eigenvalue| {0:.3e})")]
    SingularBlock(f64),

    #[error("minor-sum dimension {n} exceeds cap {cap}")]
    MinorSumTooLarge { n: usize, cap: usize },

    #[error("{0}")]
    Domain(String),

    #[error("malformed operator data: {0}")]
    Format(String),
}

impl CoreError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }
}
