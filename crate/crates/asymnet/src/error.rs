//! Error and warning types shared across the crate.

use crate::report::ValidationReport;
use crate::variable::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation's contract (unknown variable, partial
    /// assignment where a full one is required, overlapping sets, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A directed cycle where a DAG is required.
    #[error("cycle detected: {0}")]
    CyclicNetwork(String),

    /// Reversing the arc would close a directed cycle.
    #[error("cannot reverse arc {from} -> {to}: another directed path from {from} to {to} exists")]
    ReversalWouldCycle { from: VarId, to: VarId },

    /// Joint enumeration was asked for a domain larger than the configured cap.
    #[error("domain of {cells} cells exceeds the enumeration cap of {cap}")]
    DomainTooLarge { cells: u128, cap: usize },

    /// The supplied evidence has probability zero under the model.
    #[error("inconsistent evidence: {0}")]
    InconsistentEvidence(String),

    /// A likelihood was requested for a hypothesis point with zero prior mass
    /// inside its block.
    #[error("undefined likelihood: {0}")]
    UndefinedLikelihood(String),

    /// A similarity-network prior is zero, so the priors cannot be recovered.
    #[error("zero prior: {0}")]
    ZeroPrior(String),

    /// Duplicated or propagated parameters of a similarity network contradict
    /// each other beyond tolerance.
    #[error("incoherent similarity network: {0}")]
    IncoherentSimnet(String),

    /// A conditional probability was requested for a conditioning event of
    /// probability zero.
    #[error("undefined conditional: {0}")]
    UndefinedConditional(String),

    /// A model failed semantic validation.
    #[error("invalid model:\n{0}")]
    Invalid(ValidationReport),

    /// The document text is not syntactically well formed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The document is well-formed JSON but violates the model schema.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A non-fatal diagnostic attached to an operation's result, e.g. a CPT row
/// that had to be filled with a uniform distribution because its conditioning
/// context has probability zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub message: String,
}

impl Warning {
    pub fn new(message: impl Into<String>) -> Self {
        Warning {
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}
