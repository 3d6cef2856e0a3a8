//! Evolving-set analysis of finite Markov chains.
//!
//! Given a row-stochastic matrix this crate computes the evolving-set process
//! `A -> A_u`, its Doob transform, conductance and modified conductance,
//! f-congestion and the blocking-style `psi` integrals, and turns them into
//! mixing-time bounds that can be checked against an exact distance oracle.
//!
//! Everything here is pure computation over `alloc` collections; file formats,
//! threads and the command-line front end live in the `mixbound` crate.
//!
//! Subset-exhaustive operations (profiles, expansion checks) are limited to
//! chains with at most [`MAX_ENUM_STATES`] states.

#![no_std]
#![forbid(unsafe_code)]
// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod chain;
pub mod congestion;
mod error;
pub mod generators;
pub mod geometry;
pub mod kernel;
pub mod levels;
pub mod linalg;
pub mod mc;
pub mod oracle;
pub mod subsets;
pub mod suite;

pub use chain::{MarkovChain, VertexSet};
pub use error::{Error, Result};
pub use kernel::{CongestionKernel, Decay};
pub use levels::{LevelProfile, SetDistribution};

/// Default absolute tolerance for threshold comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest state count accepted by operations that enumerate every subset.
pub const MAX_ENUM_STATES: usize = 24;
