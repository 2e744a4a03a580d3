//! Cops and robbers on random graphs.
//!
//! Seeded random-graph generators, constructive checks of the expansion
//! properties that make `O(sqrt n)` cops sufficient, executable versions
//! of the dense and sparse cop strategies, and an exact retrograde solver
//! used as ground truth on small graphs.

pub mod bounds;
pub mod expansion;
pub mod game;
pub mod graph;
pub mod matching;
pub mod random;
pub mod solver;
pub mod strategies;

pub use graph::{Graph, GraphError, Vertex, VertexSet};
