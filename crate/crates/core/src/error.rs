use thiserror::Error;

use crate::root_lattice::BasisLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight {0} is invalid: every weight must be at least 2")]
    InvalidWeight(i64),

    #[error(
        "signature {weights:?} is not elliptic: sum(1 - 1/r_i) = {sum} != 2; \
         radical rank {radical_rank} ({classification} type)"
    )]
    NonEllipticSignature {
        weights: Vec<u32>,
        sum: String,
        radical_rank: usize,
        classification: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("resource cap exceeded: {requested} items requested, limit {limit}")]
    ResourceCap { requested: u128, limit: u128 },

    #[error("vector is not a real root (self-pairing {norm})")]
    NotRealRoot { norm: i64 },

    #[error("vertex {0} is not valid here")]
    InvalidVertex(BasisLabel),

    #[error("vector has nonzero vMinus1 coordinate {0}; only affine-diagram support is allowed")]
    UnsupportedVertex(i64),

    #[error("matrix does not preserve the Gram form")]
    NotIsometry,

    #[error("degenerate central charge: {0}")]
    DegenerateCharge(&'static str),

    #[error("charge is not normalized (Z(a) != 1)")]
    NotNormalized,

    #[error("charge is not in H (im tau <= 0)")]
    NotInH,

    #[error("charge is not in E (needs Z(a) = 1 and im Z(b) > 0)")]
    NotInE,

    #[error("charge is not in the closure of the fundamental domain")]
    NotInClosureD,

    #[error("reduction exceeded the iteration cap of {0} reflections")]
    IterationCap(usize),

    #[error("vector is not a root")]
    NotRoot,

    #[error("class is not primitive (coordinate gcd {0})")]
    NotPrimitive(i64),

    #[error("classes are linearly dependent")]
    LinearlyDependent,

    #[error("pairing matrix {0:?} is not one of the rank-two wall lattice types")]
    UnsupportedPairing([[i64; 2]; 2]),

    #[error("no Jordan-Hoelder decomposition: the class is not destabilized on this locus")]
    NoDecomposition,

    #[error("{0} candidate decompositions: the wall point is not generic")]
    AmbiguousDecomposition(usize),

    #[error("path endpoint lies on a wall (partner {0:?})")]
    EndpointOnWall(Vec<i64>),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap { .. } | Error::IterationCap(_) => 2,
            _ => 1,
        }
    }
}
