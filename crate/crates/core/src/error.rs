use thiserror::Error;

use crate::functionality::Witness;
use crate::monoid::MonoidError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Monoid(#[from] MonoidError),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown input symbol `{0}`")]
    UnknownSymbol(String),

    #[error("power-set construction exceeded the limit of {limit} states")]
    StateLimit { limit: usize },

    #[error("transducer is not functional: {0}")]
    NotFunctional(Witness),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
