//! Average entanglement entropy of random pure fermionic Gaussian states.
//!
//! The crate provides three independent routes to the same numbers:
//!
//! * closed forms in terms of digamma functions ([`formulas`]),
//! * Jacobi-ensemble integrals over the level density of the restricted
//!   complex structure ([`rmt`]),
//! * Monte Carlo sampling of Haar-random Gaussian states, eigenstates of
//!   random quadratic Hamiltonians and Haar-random pure states
//!   ([`ensembles`], driven by [`stats`]).
//!
//! All entropies are in nats.

pub mod ensembles;
pub mod error;
pub mod formulas;
pub mod gstates;
pub mod linalg;
pub mod rmt;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use gstates::{ComplexStructure, RestrictedSpectrum, SystemSplit};
pub use linalg::{Matrix, OrthogonalMatrix, RngStream};
pub use rmt::JacobiKernelCtx;
pub use stats::MCEstimate;
