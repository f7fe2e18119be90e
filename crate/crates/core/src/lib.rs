//! Minimum-time gap analysis for finite-dimensional quantum control systems
//! `ẋ = Ax + Σ Bᵢx uᵢ`.
//!
//! The crate decides zero-time controllability from the Lie closure of the
//! control matrices, issues certified lower bounds on the orbit-space diameter
//! `D(G)` and on the minimum time `T(Σ)` from explicit witness pairs, and
//! estimates `D(G)`, `M(G)`, `R(G)` numerically by optimizing over the group.

pub mod error;
pub mod estimator;
pub mod liealg;
pub mod numkernel;
pub mod pipeline;
pub mod repkit;
pub mod system;
pub mod witness;

pub use error::{Error, Result};
