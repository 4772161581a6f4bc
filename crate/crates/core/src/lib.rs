//! Stochastic-geometry models of D2D-enabled aerial networks.
//!
//! Platforms hovering at altitude `L` form a Matérn type-II hard-core process;
//! ground users form Poisson processes. The crate provides the air-to-ground
//! and D2D channel models, the nearest-platform distance laws, the threshold
//! D2D distance with its averaged closed form, the TDDS and RSSS mode
//! selection rules with their D2D-use probabilities, and a seeded parallel
//! Monte Carlo engine that checks every closed form against network
//! realizations.

pub mod assoc;
pub mod channel;
pub mod error;
pub mod modeselect;
pub mod montecarlo;
pub mod nearestdist;
pub mod pointprocess;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
