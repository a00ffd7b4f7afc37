//! Weighted dual graphs of surface resolutions.

pub mod graph;
pub mod hj;
pub mod matrix;
pub mod paths;

pub use graph::{Vertex, VertexId, WeightedDualGraph};
pub use hj::{hj_expansion, hj_graph};
pub use matrix::{det, intersection_matrix, is_negative_definite, leading_minors, IntMatrix};
pub use paths::{
    chain_bound, enumerate_trees, find_chain, fork_census, simple_paths_from, split_at_edge,
    ForkCensus, MarkedVertexPath,
};
