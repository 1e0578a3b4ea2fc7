//! Incremental embedding of dynamic graphs.
//!
//! A static two-layer GCN embeds the first snapshot. Each later snapshot is
//! reached by updating only the rows whose receptive field changed, either
//! with order-wise update matrices ([`dygcn`]) or with a first-order update
//! followed by one normalized-adjacency propagation ([`spectral`]).

pub mod error;
pub mod linalg;
pub mod graph;
pub mod rng;
pub mod gcn;
pub mod dygcn;
pub mod spectral;
pub mod loss;
pub mod trainer;
pub mod synth;
pub mod io;
pub mod eval;
pub mod cli;

pub use error::{Error, Result};
pub use graph::{GraphDelta, GraphSnapshot, InfluenceSets};
pub use linalg::{Activation, EmbeddingMatrix, Matrix};
