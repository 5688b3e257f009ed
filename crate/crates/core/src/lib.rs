//! Edge coloring with at most Δ+1 colors.
//!
//! The crate holds a compact graph type, an incrementally indexed partial
//! coloring, the classical fan-and-path extension, Eulerian degree splitting,
//! slack coloring, a randomized divide-and-combine baseline and a
//! hub-sampling algorithm that extends whole stars of uncolored edges in
//! rounds. [`harness`] wires them to generators, verification and benchmarks.

pub mod altpath;
pub mod baseline;
pub mod coloring;
pub mod error;
pub mod euler;
pub mod fast;
pub mod graph;
pub mod harness;
pub mod vizing;

#[cfg(test)]
pub(crate) mod test_support;

pub use coloring::{Color, PartialColoring, UNCOLORED};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, VertexId};
