//! Three-spin XX chain with a three-spin interaction, driven out of
//! equilibrium by two thermal baths attached to the end spins.
//!
//! The crate is organised along the simulation pipeline:
//!
//! * [`spectrum`]: the chain Hamiltonian and its closed-form eigensystem,
//!   with a numerical diagonalisation used as an independent check.
//! * [`lindblad`]: secular jump operators, dissipators, the Liouvillian,
//!   RK4 time evolution and the non-equilibrium steady state.
//! * [`correlations`]: reduced two-spin states, entropies, mutual
//!   information, Wootters concurrence, quantum discord and classical
//!   correlation.
//! * [`sweep`]: parameter-sweep harness and config parsing behind the CLI.

pub mod correlations;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use linalg::{Mat2, Mat4, Mat8, C64};
