//! Length functionals of metric continua, sampled.
//!
//! This crate computes and certifies the Steiner-tree-based length
//! functionals of finite samples of metric continua:
//!
//! - minimum spanning tree length `mst(P)` and exact Steiner tree lengths
//!   `smt(P)` (small planar instances) and restricted-candidate trees via
//!   dynamic programming;
//! - estimators for the Menger length `L_M`, the Menger-Choquet length
//!   `L_MC` and the intrinsic Menger length `L_IM` over eps-net
//!   hierarchies, each reported with direction and resolution parameters;
//! - constructive delta-covers whose total diameter certifies upper bounds
//!   on outer linear measure, and the converse cover-to-tree construction;
//! - generators for the classic example families (semicircle chains, Koch
//!   iterates, shrunken Koch curves, square diagonals, polylines) with
//!   analytic lengths;
//! - a harness for desk-scale lower-semicontinuity experiments on those
//!   families (excess convergence, hit collections, discrete lower limits,
//!   closure invariance).
//!
//! The `menger` binary exposes all of it as a CLI; see the README.

pub mod cli;
pub mod error;
pub mod golab;
pub mod graph;
pub mod length;
pub mod metric;
pub mod report;
pub mod shapes;
pub mod steiner;

pub use error::{Error, Result};
pub use metric::{ExtLength, IndexSet, Metric, MetricSpace};
