//! Geometric phase of a qubit weakly coupled to an Ohmic bosonic bath.
//!
//! The reduced dynamics follow the Davies Markovian master equation; the
//! phase is the purification-based functional evaluated on the spectral
//! decomposition of the evolving density matrix.
//!
//! Units: `hbar = eps = k_B = 1`, so the free period is `2 pi`.

pub mod bath;
pub mod davies;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod linalg;
pub mod phase;
pub mod quadrature;
pub mod validation;

pub use error::Error;
