//! Secular jump operators A_j(ω).
//!
//! Every stored entry is a lowering operator: A_j(ω) maps eigenstates of
//! energy ε to energy ε − ω with ω > 0, weighted by ⟨φ_l|σ_jˣ|φ_l'⟩.

use crate::error::{Error, Result};
use crate::linalg::{c, sigma_x_on, Mat8};
use crate::spectrum::Spectrum;

use super::bath::{BathIndex, OMEGA_MIN};

/// Frequencies closer than this share one secular bucket.
pub const FREQ_TOL: f64 = 1e-9;

/// Matrix elements below this are treated as exact zeros of the coupling.
const AMPLITUDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpMode {
    /// Closed-form transition operators, valid away from k = J.
    Analytic,
    /// Bucket all eigenpair differences by Bohr frequency.
    Generic,
}

impl std::str::FromStr for JumpMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(JumpMode::Analytic),
            "generic" => Ok(JumpMode::Generic),
            other => Err(Error::InvalidParameter(format!(
                "unknown jump mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct JumpOp {
    pub omega: f64,
    pub a: Mat8,
    pub a_dag: Mat8,
}

impl JumpOp {
    fn new(omega: f64, a: Mat8) -> Self {
        JumpOp {
            omega,
            a_dag: a.adjoint(),
            a,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct JumpOperatorSet {
    pub bath1: Vec<JumpOp>,
    pub bath3: Vec<JumpOp>,
}

impl JumpOperatorSet {
    pub fn bath(&self, j: BathIndex) -> &[JumpOp] {
        match j {
            BathIndex::One => &self.bath1,
            BathIndex::Three => &self.bath3,
        }
    }

    fn bath_mut(&mut self, j: BathIndex) -> &mut Vec<JumpOp> {
        match j {
            BathIndex::One => &mut self.bath1,
            BathIndex::Three => &mut self.bath3,
        }
    }

    /// Entry of bath `j` whose frequency matches `omega` within [`FREQ_TOL`].
    pub fn find(&self, j: BathIndex, omega: f64) -> Option<&JumpOp> {
        self.bath(j)
            .iter()
            .find(|op| (op.omega - omega).abs() < FREQ_TOL)
    }
}

pub fn build_jump_operators(spec: &Spectrum, mode: JumpMode) -> Result<JumpOperatorSet> {
    let raw = match mode {
        JumpMode::Generic => generic_entries(spec)?,
        JumpMode::Analytic => analytic_entries(spec)?,
    };
    let mut set = JumpOperatorSet::default();
    for (j, entries) in raw {
        let merged = canonicalize(entries)?;
        *set.bath_mut(j) = merged;
    }
    Ok(set)
}

type RawEntries = Vec<(BathIndex, Vec<(f64, Mat8)>)>;

fn generic_entries(spec: &Spectrum) -> Result<RawEntries> {
    let mut out = Vec::new();
    for j in BathIndex::BOTH {
        let coupling = sigma_x_on(j.site());
        let mut entries = Vec::new();
        for l in 0..8 {
            for lp in 0..8 {
                // φ_lp → φ_l releases ε_lp − ε_l
                let omega = spec.energies[lp] - spec.energies[l];
                if omega < -FREQ_TOL {
                    continue;
                }
                let amp = (spec.states[l].adjoint() * coupling * spec.states[lp])[(0, 0)];
                if amp.norm() < AMPLITUDE_TOL {
                    continue;
                }
                entries.push((omega, spec.transition(l + 1, lp + 1) * amp));
            }
        }
        out.push((j, entries));
    }
    Ok(out)
}

/// The six closed-form operators, written as the raising maps X(ω) with
/// ε_l − ε_l' = ω and converted to (frequency, lowering operator).
///
/// The ω₃ operator of bath 3 carries sin(α₁ − α₂) = 1 with the sign pattern
/// (+, −) on |φ₆⟩⟨φ₅| and |φ₈⟩⟨φ₇|; that is what σ₃ˣ actually produces.
fn analytic_entries(spec: &Spectrum) -> Result<RawEntries> {
    let p = &spec.params;
    if (p.k - p.j).abs() < 1e-6 * p.j {
        return Err(Error::AnalyticCollision { k: p.k });
    }
    let a = &spec.angles;
    let t = |l, m| spec.transition(l, m);
    let e = &spec.energies;
    let omega1 = e[4] - e[0];
    let omega2 = e[6] - e[0];
    let omega3 = e[3] - e[0];
    let (s1, c1, s2, c2) = (a.sin_a1, a.cos_a1, a.sin_a2, a.cos_a2);
    let sin_minus = (a.alpha1() - a.alpha2()).sin();
    let r = c(std::f64::consts::FRAC_1_SQRT_2);

    let bath1 = vec![
        (
            omega1,
            (t(2, 8) * c(s1) - t(6, 4) * c(c2) - t(3, 7) * c(c2) + t(5, 1) * c(s1)) * r,
        ),
        (
            omega2,
            (t(2, 6) * c(s2) - t(8, 4) * c(c1) - t(3, 5) * c(c1) + t(7, 1) * c(s2)) * r,
        ),
        (
            omega3,
            (t(2, 3) - t(6, 5) * c(sin_minus) + t(8, 7) * c(sin_minus) - t(4, 1)) * r,
        ),
    ];
    let bath3 = vec![
        (
            omega1,
            (t(2, 8) * c(s1) + t(6, 4) * c(c2) + t(3, 7) * c(c2) + t(5, 1) * c(s1)) * r,
        ),
        (
            omega2,
            (t(2, 6) * c(s2) + t(8, 4) * c(c1) + t(3, 5) * c(c1) + t(7, 1) * c(s2)) * r,
        ),
        (
            omega3,
            (t(2, 3) + t(6, 5) * c(sin_minus) - t(8, 7) * c(sin_minus) - t(4, 1)) * -r,
        ),
    ];
    let lower = |(omega, raising): (f64, Mat8)| {
        if omega < 0.0 {
            (-omega, raising)
        } else {
            (omega, raising.adjoint())
        }
    };
    Ok(vec![
        (BathIndex::One, bath1.into_iter().map(lower).collect()),
        (BathIndex::Three, bath3.into_iter().map(lower).collect()),
    ])
}

/// Rejects vanishing frequencies and sums entries that share a frequency.
/// Input frequencies are non-negative.
fn canonicalize(mut entries: Vec<(f64, Mat8)>) -> Result<Vec<JumpOp>> {
    if let Some((omega, _)) = entries
        .iter()
        .find(|(w, _)| w.abs() <= OMEGA_MIN.max(FREQ_TOL))
    {
        return Err(Error::NearDegenerateFrequency {
            omega: *omega,
            detail: "coupled eigenstates are (nearly) degenerate".into(),
        });
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Mat8)> = Vec::new();
    for (omega, a) in entries {
        match out.last_mut() {
            Some((w, acc)) if (omega - *w).abs() < FREQ_TOL => *acc += a,
            _ => out.push((omega, a)),
        }
    }
    Ok(out
        .into_iter()
        .filter(|(_, a)| a.norm() > AMPLITUDE_TOL)
        .map(|(w, a)| JumpOp::new(w, a))
        .collect())
}
