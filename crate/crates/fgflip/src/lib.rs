//! Quantum cluster combinatorics of the Fock–Goncharov flip.
//!
//! * [`skewspace`]: exact skew-symmetric spaces and vectors.
//! * [`triangle`]: the triangle spaces ∇_N, their distinguished vectors,
//!   fundamental weights and the symplectic embedding.
//! * [`braidgraph`]: colored braid graphs, mutations, paths and partition
//!   functions, and the snake-path reduction.
//! * [`wordalgebra`]: dilogarithm/Gaussian words, rewriting rules and the
//!   executable pentagon proofs.
//! * [`qdilog`]: numerical quantum dilogarithm.
//! * [`modulardata`]: closed-form modular data.
//! * [`cli`]: command-line front end.

pub mod braidgraph;
pub mod cli;
pub mod linalg;
pub mod modulardata;
pub mod qdilog;
pub mod skewspace;
pub mod triangle;
pub mod wordalgebra;

/// Version tag of every JSON document this crate emits.
pub const SCHEMA: &str = "fgflip/1";

pub use skewspace::{BasisLabel, SkewSpace, SkewVector, Space, Q};
