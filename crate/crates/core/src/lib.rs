//! Exact simulation of an anharmonic vibrational dimer coupled to a single
//! cavity mode.
//!
//! With `N_B` quanta shared between the cavity and the two vibrational
//! modes, the number states map onto the sites `(v, p)` of a triangular
//! lattice ([`fock`]). [`model`] assembles the Hamiltonian and its mirror
//! blocks, [`spectral`] diagonalizes and propagates, [`dynamics`] computes
//! populations and limiting probabilities, [`critical`] locates the
//! critical coupling, and [`fourlevel`] is the reduced analytic model.

pub mod cli;
pub mod critical;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod fourlevel;
pub mod linalg;
pub mod model;
pub mod output;
pub mod spectral;

pub use error::{Error, Result};
