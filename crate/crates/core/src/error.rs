use thiserror::Error;

use crate::coloring::Color;
use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("vertex sets overlap at vertex {0}")]
    OverlappingSets(VertexId),
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(VertexId, VertexId),

    #[error("edge {0} is already colored")]
    AlreadyColored(EdgeId),
    #[error("edge {0} is uncolored")]
    Uncolored(EdgeId),
    #[error("color {color} is outside the palette 1..={palette}")]
    ColorOutOfRange { color: Color, palette: u32 },
    #[error("cannot give edge {edge} color {color}: already used at vertex {vertex}")]
    ColorConflict {
        edge: EdgeId,
        color: Color,
        vertex: VertexId,
    },
    #[error("color {color} is not missing at vertex {vertex}")]
    NotMissing { vertex: VertexId, color: Color },

    #[error("vertex {0} misses neither path color; the alternating structure through it is ambiguous")]
    AmbiguousStart(VertexId),
    #[error("path no longer matches the coloring")]
    StalePath,
    #[error("fan no longer matches the coloring")]
    StaleFan,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("hub sampling failed after {0} attempts")]
    SamplingFailed(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
