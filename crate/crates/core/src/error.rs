use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("arm index {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// No exploration parameter satisfies the admissibility condition at this confidence.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The failure-probability guarantee does not apply (rho * delta >= 1).
    #[error("vacuous bound: rho * delta = {rho_delta} >= 1")]
    VacuousBound { rho_delta: f64 },

    #[error("arm {0} has not been pulled")]
    Unpulled(usize),

    #[error("sampler contract violation: {0}")]
    Contract(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
