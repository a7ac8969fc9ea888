use thiserror::Error;

use crate::algebra::Tag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group element has {found} coordinates, expected {expected}")]
    Arity { expected: usize, found: usize },

    #[error("group element kind does not match the group instance")]
    GroupMismatch,

    #[error("algebra tag mismatch: expected {expected}, found {found}")]
    TagMismatch { expected: Tag, found: Tag },

    #[error("symbol {symbol} is not admissible in {tag}")]
    Inadmissible { symbol: String, tag: Tag },

    #[error("differential order {order} exceeds the configured cap {cap}")]
    OrderCap { order: u32, cap: u32 },

    #[error("operand of order {0} is outside D1")]
    OrderTooHigh(u32),

    #[error("pairing is degenerate: the pairing vanishes at {0}")]
    Degenerate(String),

    #[error("{0} is not in the scaling set of the grading group")]
    NotInScalingSet(String),

    #[error("scalar must be nonzero: {0}")]
    ZeroScalar(&'static str),

    #[error("scalar {0} is not rational")]
    NotRational(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("not a derivation: {0}")]
    NotADerivation(String),

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("pulled-back form is not a 2-cocycle: {0}")]
    PullbackNotCocycle(String),

    #[error("derivation has unbounded support on probe {probe}: {degrees} output degrees exceed the bound {bound}")]
    UnboundedSupport {
        probe: String,
        degrees: usize,
        bound: usize,
    },

    #[error("probe system is singular")]
    SingularProbe,

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
