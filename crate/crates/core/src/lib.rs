//! Discrete calculus, isoperimetric constants and heat flow on finite graphs.

pub mod calculus;
pub mod constants;
pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod graph;
pub mod harmonic;
pub mod linalg;
pub mod minimax;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, Region, SubgraphWindow, VertexFunction};
