//! Simulation and numerical verification toolkit for the symmetric inclusion
//! process (SIP) in the condensation regime.
//!
//! The crate covers the particle system on a periodic lattice, the two-particle
//! difference chain and its condensive scaling, the sticky Brownian motion
//! kernel that arises in the limit, the variance of the density fluctuation
//! field, and discrete Dirichlet forms together with their continuum limits.
//!
//! Every capability has a runnable program under `examples/`, and the thin
//! `sipcond` binary exposes the same operations as CLI subcommands that emit
//! CSV tables.

pub mod difference_chain;
pub mod dirichlet_forms;
pub mod error;
pub mod fluctuation_field;
pub mod harness;
pub mod kernel;
pub mod quadrature;
pub mod rng;
pub mod sip_lattice;
pub mod special;
pub mod stats;
pub mod sticky_bm;
pub mod sumtree;
pub mod test_function;

pub use error::{Error, Result};
pub use kernel::FiniteRangeKernel;
