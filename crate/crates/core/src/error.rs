use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Returned when a direction vector is too short to normalize.
    #[error("zero vector: norm {norm:.3e} is below the 1e-9 floor")]
    ZeroVector { norm: f64 },

    /// Returned when collapsing onto an outcome whose Born probability is
    /// numerically zero.
    #[error("impossible outcome: Born probability {probability:.3e} is below 1e-12")]
    ImpossibleOutcome { probability: f64 },

    /// Returned when mixture weights are negative or fail to sum to one.
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    /// Returned for out-of-range optimizer or sweep parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Returned when a correlator pair received no trials.
    #[error("insufficient trials: pair {pair} received zero trials")]
    InsufficientTrials { pair: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
