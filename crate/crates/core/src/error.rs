use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("kernel entry for agent {agent} round {round} references unknown type {label:?}")]
    DanglingKernelEntry { agent: String, round: usize, label: String },

    #[error("distribution from {state} sums to {total}, expected 1")]
    NonUnitDistribution { state: String, total: String },

    #[error("utility entry {entry} references an undefined label {label:?}")]
    MissingUtility { entry: String, label: String },

    #[error("no kernel entry defined for {state}")]
    UndefinedKernelEntry { state: String },

    #[error("invalid game: {0}")]
    InvalidSpec(String),

    #[error("profile shape mismatch: {0}")]
    ProfileShapeMismatch(String),

    #[error("strategy {strategy:?} of {agent} has no answer at round {round}: {reason}")]
    UnreachableObservation { agent: String, strategy: String, round: usize, reason: String },

    #[error("script reference unbound: {0}")]
    UnboundScriptReference(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("hypothesis violated at round {round}: {detail}")]
    HypothesisViolated { round: usize, detail: String },

    #[error("guarantee fails for {agent}: adversarial value {value} below {bound}")]
    CertificateFailure { agent: String, value: String, bound: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
