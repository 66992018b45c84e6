//! Spectral diagnostics and sampling laboratory for two-spin Gibbs
//! distributions (Ising, hard-core) on small graphs.
//!
//! The crate builds graph matrices and self-avoiding-walk trees, computes
//! pairwise influence matrices by two independent routes (exact enumeration
//! and walk-tree weight sums), verifies spectral identities and bounds
//! numerically, and runs Glauber dynamics with exact mixing diagnostics.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod gibbs;
pub mod glauber;
pub mod graph;
pub mod influence;
pub mod io;
pub mod labeled;
pub mod linalg;
pub mod recursion;
pub mod report;
pub mod rng;
pub mod sawtree;
pub mod spectral;

pub use gibbs::{Boundary, GibbsParams, ModelTag, SpinConfig};
pub use graph::{Graph, OrientedEdge};
pub use labeled::{Label, LabeledMatrix};
pub use sawtree::{SawTree, SpinConvention};
