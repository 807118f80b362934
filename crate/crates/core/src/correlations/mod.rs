//! Pairwise correlation measures of the chain state.
//!
//! All entropies are in bits. Discord and classical correlation use von
//! Neumann projective measurements on one spin of the pair (spin B, the
//! second kept spin, unless stated otherwise).

mod concurrence;
mod discord;
mod entropy;
mod reduce;

pub use concurrence::concurrence;
pub use discord::{
    classical_correlation, conditional_entropy_measured, measurement_basis, optimize_measurement,
    quantum_discord, DiscordResult, MeasurementAngles, COARSE_PHI, COARSE_THETA, ZOOM_ROUNDS,
};
pub use entropy::{mutual_information, von_neumann_entropy};
pub use reduce::{partial_trace, reduce_a, reduce_b, swap_parties, SpinPair};

use serde::Serialize;

use crate::error::Result;
use crate::linalg::Mat8;
use crate::spectrum::{analytic_eigensystem, ChainParams};

/// Which spin of the pair is measured when optimising the discord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasuredSide {
    /// Second kept spin (spin 3 for pairs 13 and 23).
    B,
    /// First kept spin.
    A,
}

impl std::str::FromStr for MeasuredSide {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(MeasuredSide::B),
            "a" => Ok(MeasuredSide::A),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "unknown measured side {other:?} (expected a or b)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRecord {
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub concurrence: f64,
    pub theta: f64,
    pub phi: f64,
}

impl CorrelationRecord {
    pub fn from_pair_state(rho_ab: &crate::linalg::Mat4, side: MeasuredSide) -> Result<Self> {
        let state = match side {
            MeasuredSide::B => *rho_ab,
            MeasuredSide::A => swap_parties(rho_ab),
        };
        let d = quantum_discord(&state)?;
        Ok(CorrelationRecord {
            discord: d.discord,
            classical_correlation: d.classical_correlation,
            mutual_information: d.mutual_information,
            concurrence: concurrence(rho_ab),
            theta: d.angles.theta,
            phi: d.angles.phi,
        })
    }
}

/// Correlations of `pair` in the three-spin state `rho`.
pub fn pair_correlations(
    rho: &Mat8,
    pair: SpinPair,
    side: MeasuredSide,
) -> Result<CorrelationRecord> {
    CorrelationRecord::from_pair_state(&partial_trace(rho, pair), side)
}

/// Correlations of `pair` in the eigenstate |φ₅⟩, which does not depend on h.
pub fn pure_state_pair_correlations(k: f64, pair: SpinPair) -> Result<CorrelationRecord> {
    let spec = analytic_eigensystem(&ChainParams::new(0.0, k)?);
    pair_correlations(&spec.projector(5), pair, MeasuredSide::B)
}
