//! Mass-action reaction-diffusion networks on the unit interval.
//!
//! The crate is organised bottom-up:
//!
//! * [`network`] represents reaction networks and evaluates mass-action rates.
//! * [`equilibria`] solves for positive and boundary steady states of the two
//!   preset families.
//! * [`grid`] integrates the reaction-diffusion system with the method of lines
//!   under homogeneous Neumann boundary conditions.
//! * [`entropy`] evaluates relative entropies, dissipations and trajectory checks.
//! * [`certificates`] assembles explicit decay-rate constants and compares them
//!   with simulated runs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod certificates;
pub mod entropy;
pub mod equilibria;
mod error;
pub mod grid;
pub mod network;

pub use equilibria::{Equilibrium, EquilibriumKind};
pub use error::{Error, Result};
pub use grid::{Grid1D, Scheme, SolverConfig, StateField, Trajectory};
pub use network::{Complex, ConservationBasis, Network, Reaction};
