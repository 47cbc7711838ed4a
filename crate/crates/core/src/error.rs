use thiserror::Error;

use crate::term::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("abstraction body still contains a lambda; compile inner abstractions first")]
    NestedLambda,
    #[error("atom `{0}` has no lambda definition")]
    NoDefinition(Atom),
    #[error("ill-formed rule `{name}`: {reason}")]
    IllFormedRule { name: String, reason: String },
    #[error("catalog: {0}")]
    Catalog(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
