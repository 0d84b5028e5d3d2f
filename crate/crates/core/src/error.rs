use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("degenerate propagator: both singular values vanish")]
    DegeneratePropagator,
    #[error("numerically dead branch at step {step}: outcome probability {probability:e}")]
    DeadBranch { step: usize, probability: f64 },
    #[error("measurement carries no information (zero fidelity)")]
    NoInformation,
    #[error("state reconstruction impossible: {0}")]
    ReconstructionImpossible(String),
}

impl Error {
    /// Whether the error comes from numerics rather than from the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegeneratePropagator
                | Error::DeadBranch { .. }
                | Error::NoInformation
                | Error::ReconstructionImpossible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
