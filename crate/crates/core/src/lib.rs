//! Markov chain Monte Carlo over decomposable graphs, with a junction tree
//! as the state of the chain.

pub mod cli;
pub mod error;
pub mod ggim;
pub mod graph;
pub mod junction_tree;
pub mod moves;
pub mod oracle;
pub mod sampler;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::Graph;
pub use junction_tree::JunctionTree;
pub use vertex_set::{Vertex, VertexSet};
