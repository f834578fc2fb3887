use crate::graph::{ArcId, VertexId};

/// Errors reported by graph construction, transformations, and factoring.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(VertexId),

    #[error("vertex {vertex} out of range for graph with {count} vertices")]
    VertexOutOfRange { vertex: VertexId, count: usize },

    #[error("arc {0} does not exist")]
    UnknownArc(ArcId),

    #[error("query not defined for the root vertex 0")]
    RootQuery,

    #[error("arcs {0} and {1} are not parallel")]
    NotParallel(ArcId, ArcId),

    #[error("source {0} and target {1} are strongly connected")]
    PreconditionSourceTarget(VertexId, VertexId),

    #[error("new source {0} and target {1} would be strongly connected")]
    PreconditionNewSourceTarget(VertexId, VertexId),

    #[error("vertex {0} has no root arc (0, {0})")]
    NoRootArc(VertexId),

    #[error("graph is not rooted at vertex {vertex}")]
    NotRooted { vertex: VertexId },

    #[error("root vertex 0 has in-arcs")]
    RootHasInArcs,

    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("weight `{0}` is not numeric")]
    NonNumericWeight(String),

    #[error("enumeration too large: {size} exceeds the limit {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("polynomial expansion exceeds {0} monomials")]
    ExpansionTooLarge(usize),

    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid isolation order: {0}")]
    InvalidOrder(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
