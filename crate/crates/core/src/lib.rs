//! Parking on random rooted binary trees.
//!
//! Cars arrive at the vertices of a rooted binary tree and drive towards the
//! root, parking on the first free vertex. This crate provides the pieces
//! needed to study that process on Galton-Watson trees with Bin(2, 1/2)
//! offspring and Poisson arrivals:
//!
//! - [`tree`]: unconditioned and size-conditioned tree samplers, exhaustive
//!   enumeration, and truncated spine segments of the infinite local limit.
//! - [`parking`]: the linear-time flux engine, a literal car-by-car simulator
//!   and parking functions on the path.
//! - [`analytics`]: closed forms for the parking probability, the root-visit
//!   generating function, the tangency solver above criticality and a
//!   fixed-point oracle for the law of the root visits.
//! - [`montecarlo`]: per-trial kernels and sequential estimators with
//!   counter-based random streams.
//!
//! The crate is `no_std` and only needs `alloc`. IO, threading and the
//! command line live in the `treepark` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod montecarlo;
pub mod parking;
pub mod rng;
pub mod tree;

pub use analytics::{CriticalQuantities, ModelParams, Regime, SpineStats, TruncatedPmf};
pub use montecarlo::Estimate;
pub use parking::{Arrivals, FluxResult};
pub use tree::{BinaryTree, NodeId, SamplerConfig};
