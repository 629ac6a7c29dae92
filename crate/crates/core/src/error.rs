use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the operation's domain (bad index, negative length, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("impossible measurement branch: outcome {outcome} on qubits {qubits:?} has probability {probability:e}")]
    ImpossibleBranch {
        qubits: Vec<usize>,
        outcome: String,
        probability: f64,
    },

    /// The state handed to the decoder does not lie in the code space.
    #[error("code-space violation: ancilla |00> weight {weight:.3e} after inverse encoder")]
    CodeSpaceViolation { weight: f64 },

    #[error("recovery failure at loss position {loss_position}: fidelity {fidelity:.3e}")]
    RecoveryFailure { loss_position: usize, fidelity: f64 },

    /// No (or more than one) Pauli word restores every codeword for an outcome.
    #[error("correction derivation failed at loss position {loss_position}, outcome {outcome}: {candidates} candidate words")]
    DerivationFailure {
        loss_position: usize,
        outcome: String,
        candidates: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
