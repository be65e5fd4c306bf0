//! Coverage ("learning curve") experiments for random walks on synthetic
//! complex networks.
//!
//! The pipeline: generate graphs ([`netgen`]), walk them ([`walks`]), turn
//! visit sequences into coverage curves and rate features ([`coverage`]), and
//! project configuration features with PCA ([`analysis`]). [`harness`] drives
//! whole experiment grids reproducibly.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analysis;
pub mod coverage;
pub mod error;
pub mod graph;
pub mod harness;
pub mod netgen;
pub mod walks;

pub use error::{Error, Result};
pub use graph::Graph;
