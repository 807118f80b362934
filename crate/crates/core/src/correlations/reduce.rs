use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::linalg::{Mat2, Mat4, Mat8};

/// A pair of chain spins; the remaining spin is traced out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpinPair {
    P12,
    P13,
    P23,
}

impl SpinPair {
    /// (A, B, traced) as 1-based sites.
    pub fn sites(self) -> (usize, usize, usize) {
        match self {
            SpinPair::P12 => (1, 2, 3),
            SpinPair::P13 => (1, 3, 2),
            SpinPair::P23 => (2, 3, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinPair::P12 => "12",
            SpinPair::P13 => "13",
            SpinPair::P23 => "23",
        }
    }
}

impl Serialize for SpinPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl fmt::Display for SpinPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SpinPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "12" => Ok(SpinPair::P12),
            "13" => Ok(SpinPair::P13),
            "23" => Ok(SpinPair::P23),
            other => Err(Error::InvalidParameter(format!(
                "unknown spin pair {other:?} (expected 12, 13 or 23)"
            ))),
        }
    }
}

fn place(site: usize, bit: usize) -> usize {
    bit << (3 - site)
}

/// ρ_AB = tr_C ρ, ordered as (A ⊗ B).
pub fn partial_trace(rho: &Mat8, pair: SpinPair) -> Mat4 {
    let (sa, sb, sc) = pair.sites();
    let full = |a: usize, b: usize, c: usize| place(sa, a) | place(sb, b) | place(sc, c);
    Mat4::from_fn(|r, col| {
        let (a, b) = (r >> 1, r & 1);
        let (a2, b2) = (col >> 1, col & 1);
        (0..2).map(|c| rho[(full(a, b, c), full(a2, b2, c))]).sum()
    })
}

/// ρ_A = tr_B ρ_AB.
pub fn reduce_a(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|a, a2| rho[(2 * a, 2 * a2)] + rho[(2 * a + 1, 2 * a2 + 1)])
}

/// ρ_B = tr_A ρ_AB.
pub fn reduce_b(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|b, b2| rho[(b, b2)] + rho[(2 + b, 2 + b2)])
}

/// Exchanges the roles of A and B.
pub fn swap_parties(rho: &Mat4) -> Mat4 {
    let swap = |i: usize| ((i & 1) << 1) | (i >> 1);
    Mat4::from_fn(|r, col| rho[(swap(r), swap(col))])
}
