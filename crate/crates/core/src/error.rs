use thiserror::Error;

use crate::parser::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Dangling references, duplicate names, undeclared symbols.
    #[error("structural error: {0}")]
    Structure(String),

    /// A well-formed model outside the requested class.
    #[error("invalid model: {0}")]
    Invalid(String),

    /// Postcondition assignments that break the observation pairing rules.
    #[error("postcondition error at event `{event}`: {reason}")]
    PostCondition { event: String, reason: String },

    #[error("invalid action type: {0}")]
    ActionType(String),

    #[error("invalid bounds: {0}")]
    Bounds(String),

    #[error("enumeration budget exceeded: {required} candidate models needed, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("action `{action}` is not executable at `{world}`")]
    NotExecutable { action: String, world: String },

    #[error("document error: {0}")]
    Document(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
