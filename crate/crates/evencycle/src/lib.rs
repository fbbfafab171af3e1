//! Signed graphs, grafts and the sibling constructions for even cycle
//! matroids, with GF(2) space computations used as exact oracles.

pub mod analysis;
pub mod discovery;
pub mod edgeset;
pub mod error;
pub mod flowers;
pub mod gf2;
pub mod graph;
pub mod ops;
pub mod planted;
pub mod templates;

pub use edgeset::EdgeSet;
pub use error::{Error, Result};
pub use gf2::{cut_space, cycle_space, even_cut_space, even_cycle_space, space_equals, GF2Space};
pub use graph::{
    components_and_blocks, enumerate_k_separations, ComponentBlocks, Edge, Graft, Graph, SignedGraph, Vertex, VertexSet,
};
