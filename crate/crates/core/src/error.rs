use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("duplicate symbol `{0}` in carrier list")]
    DuplicateSymbol(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("functor `{0}` does not preserve finite sets")]
    NotFinitary(String),

    #[error("not enumerable: {0}")]
    NotEnumerable(String),

    #[error("enumeration limit of {limit} elements exceeded{}", level_suffix(.level))]
    EnumerationLimit { limit: usize, level: Option<usize> },

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid coalgebra: {0}")]
    Coalgebra(String),

    #[error("not a partition: {0}")]
    NotPartition(String),
}

fn level_suffix(level: &Option<usize>) -> String {
    match level {
        Some(l) => format!(" while building final-sequence level {l}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }

    pub(crate) fn ty(msg: impl Into<String>) -> Self {
        Error::Type(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
