//! Median graphs and their cube completions.
//!
//! The crate covers exact medianness checking, hyperplane combinatorics,
//! cube completion with vertex links, dualisation of finite wallspaces,
//! invariant cubes of finite group actions, and breakpoint growth of
//! piecewise-linear circle homeomorphisms.

pub mod actions;
pub mod cli;
pub mod cubes;
pub mod cubulation;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hyperplanes;
pub mod median;
pub mod plcircle;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
