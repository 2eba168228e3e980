//! Exact exchange statistics for collisions between two baths carrying
//! non-commuting conserved charges.
//!
//! The crate is `no_std` + `alloc`. It covers:
//!
//! - [`matlin`]: small dense complex linear algebra (Jacobi eigensolver,
//!   Hermitian exponentials, Kronecker products, real nullspaces);
//! - [`gibbs`]: baths as charge sets with affinities, generalized Gibbs states;
//! - [`commutant`]: charge-preservation certificates and the space of allowed
//!   interaction Hamiltonians;
//! - [`collision`]: exhaustive two-point-measurement trajectories of one
//!   collision;
//! - [`statistics`]: the joint current distribution and the fluctuation
//!   relations it obeys;
//! - [`qubit`]: the spin-1/2 model with charges `σ_z`, `σ_x` and its
//!   parameter sweeps.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod collision;
pub mod commutant;
mod error;
pub mod gibbs;
pub mod math;
pub mod matlin;
pub mod qubit;
pub mod statistics;

pub use error::{Error, Result, Side};
pub use num_complex::Complex64;
