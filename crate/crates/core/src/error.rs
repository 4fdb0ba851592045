use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),

    #[error("head variable `{0}` does not occur in the body")]
    HeadVariableNotInBody(String),

    #[error("query body must contain at least one atom")]
    EmptyBody,

    #[error("relation `{relation}` used with arity {found}, expected {expected}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },

    #[error("relation `{0}` is not part of the schema")]
    UnknownRelation(String),

    #[error("duplicate relation `{0}` in schema")]
    DuplicateRelation(String),

    #[error("queries have different arities ({left} vs {right})")]
    QueryArityMismatch { left: usize, right: usize },

    #[error("query is not a 2CQ: relation `{relation}` occurs {count} times")]
    NotTwoCq { relation: String, count: usize },

    #[error("query is not minimal (its core has {core_atoms} atoms, the query has {atoms})")]
    NotMinimal { atoms: usize, core_atoms: usize },

    #[error("schema is empty")]
    EmptySchema,

    #[error("schema has no relation of positive arity, so no query of arity {0} exists")]
    NoQueriesOfArity(usize),

    #[error("set of relation names is empty")]
    EmptyRelationSet,

    #[error("bit string is empty")]
    EmptyBits,

    #[error("invalid bit `{0}` in oriented path string")]
    InvalidBit(char),

    #[error("query arity {found} does not match the graph arity {expected}")]
    GraphArityMismatch { expected: usize, found: usize },

    #[error("node cap of {cap} exceeded after discovering {discovered} nodes")]
    NodeCapExceeded { cap: usize, discovered: usize },

    #[error("query `{0}` has no node in the graph (closure violation)")]
    NotInGraph(String),

    #[error("no path between `{0}` and `{1}`: graph is disconnected")]
    Disconnected(String, String),

    #[error("malformed graph file: {0}")]
    MalformedGraph(String),

    #[error("graph file header mismatch: {0}")]
    GraphHeaderMismatch(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// Whether the error stems from bad user input rather than a broken internal invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NodeCapExceeded { .. } | Error::NotInGraph(_) | Error::Disconnected(..)
        )
    }
}
