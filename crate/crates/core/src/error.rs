use thiserror::Error;

use crate::complexes::{Face, Vertex};

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex label {label} is out of range (allowed 1..={max})")]
    LabelOutOfRange { label: i64, max: u32 },

    #[error("duplicate vertex label {0}")]
    DuplicateLabel(Vertex),

    #[error("face {face} is not contained in the vertex set {vertices}")]
    FaceOutsideVertexSet { face: Face, vertices: Face },

    #[error("vertex sets overlap on {0}")]
    OverlappingLabels(Face),

    #[error("{what} exceeds the size bound {bound}")]
    SizeBound { what: String, bound: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("label {0} is not a basis element of degree {1}")]
    UnknownLabel(String, i64),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("composite of differentials into degree {0} is nonzero")]
    SquareNonZero(i64),

    #[error("complex is not shifted")]
    NotShifted,

    #[error("filling of {subset} is not acyclic")]
    FillingNotAcyclic { subset: Face },

    #[error("no missing face matches level {level} of the nested product")]
    EmptyTaylorFactor { level: usize },

    #[error("vertical preimage does not exist at zigzag step {step}")]
    SolveFailed { step: usize },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn size(what: impl Into<String>, bound: usize) -> Self {
        Error::SizeBound {
            what: what.into(),
            bound,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
