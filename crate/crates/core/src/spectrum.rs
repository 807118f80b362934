//! Chain Hamiltonian and its eigensystem.
//!
//! H = J Σᵢ (σᵢˣσᵢ₊₁ˣ + σᵢʸσᵢ₊₁ʸ) + h Σᵢ σᵢᶻ + k (σ₁ˣσ₂ᶻσ₃ˣ + σ₁ʸσ₂ᶻσ₃ʸ)
//!
//! The Hamiltonian conserves total magnetisation, so the eight eigenstates
//! split into the two fully polarised states, an antisymmetric state and two
//! symmetric states in each of the one- and two-excitation sectors. The
//! closed forms are kept in their conventional label order φ₁..φ₈ rather
//! than sorted by energy, because occupation probabilities and the φ₃/φ₅ gap
//! refer to those labels.

use nalgebra::SVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, hermiticity_error, Mat8, C64, ONE};

pub type Ket8 = SVector<C64, 8>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    /// Nearest-neighbour XX exchange; the energy unit.
    pub j: f64,
    /// Homogeneous magnetic field.
    pub h: f64,
    /// Three-spin interaction strength.
    pub k: f64,
}

impl ChainParams {
    /// Parameters in units of the exchange coupling (J = 1).
    pub fn new(h: f64, k: f64) -> Result<Self> {
        Self::with_coupling(1.0, h, k)
    }

    pub fn with_coupling(j: f64, h: f64, k: f64) -> Result<Self> {
        if !(j.is_finite() && h.is_finite() && k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite chain parameters J={j}, h={h}, k={k}"
            )));
        }
        if j <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "exchange coupling must be positive, got J={j}"
            )));
        }
        let p = ChainParams { j, h, k };
        if !p.in_standard_regime() {
            log::warn!("h={h}, k={k} lies outside the studied regime h >= 0, k >= 0");
        }
        Ok(p)
    }

    pub fn in_standard_regime(&self) -> bool {
        self.h >= 0.0 && self.k >= 0.0
    }
}

/// Mixing coefficients of the symmetric one- and two-excitation eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingAngles {
    #[serde(rename = "B")]
    pub b: f64,
    pub sin_a1: f64,
    pub cos_a1: f64,
    pub sin_a2: f64,
    pub cos_a2: f64,
}

impl MixingAngles {
    pub fn new(k: f64) -> Self {
        Self::with_coupling(1.0, k)
    }

    pub fn with_coupling(j: f64, k: f64) -> Self {
        let b = (8.0 * j * j + k * k).sqrt();
        let s = 2.0 * std::f64::consts::SQRT_2 * j;
        let n1 = (s * s + (k - b).powi(2)).sqrt();
        let n2 = (s * s + (k + b).powi(2)).sqrt();
        MixingAngles {
            b,
            sin_a1: s / n1,
            cos_a1: (k - b) / n1,
            sin_a2: s / n2,
            cos_a2: (k + b) / n2,
        }
    }

    pub fn alpha1(&self) -> f64 {
        self.sin_a1.atan2(self.cos_a1)
    }

    pub fn alpha2(&self) -> f64 {
        self.sin_a2.atan2(self.cos_a2)
    }
}

pub fn mixing_angles(k: f64) -> MixingAngles {
    MixingAngles::new(k)
}

/// Eigensystem in label order; `states[l]` is |φ_{l+1}⟩.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub params: ChainParams,
    pub energies: [f64; 8],
    pub states: [Ket8; 8],
    pub angles: MixingAngles,
}

impl Spectrum {
    /// Unitary whose columns are the eigenstates.
    pub fn basis(&self) -> Mat8 {
        Mat8::from_columns(&self.states)
    }

    /// |φ_l⟩⟨φ_m| with 1-based labels.
    pub fn transition(&self, l: usize, m: usize) -> Mat8 {
        self.states[l - 1] * self.states[m - 1].adjoint()
    }

    pub fn projector(&self, l: usize) -> Mat8 {
        self.transition(l, l)
    }

    /// max_l ‖H|φ_l⟩ − ε_l|φ_l⟩‖.
    pub fn max_residual(&self, hamiltonian: &Mat8) -> f64 {
        self.states
            .iter()
            .zip(self.energies.iter())
            .map(|(v, &e)| (hamiltonian * v - v * c(e)).norm())
            .fold(0.0, f64::max)
    }

    /// max |⟨φ_l|φ_m⟩ − δ_lm|.
    pub fn orthonormality_error(&self) -> f64 {
        let u = self.basis();
        (u.adjoint() * u - Mat8::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn basis_ket(bits: &str) -> Ket8 {
    let idx = usize::from_str_radix(bits, 2).expect("binary label");
    let mut v = Ket8::zeros();
    v[idx] = ONE;
    v
}

pub fn build_hamiltonian(p: &ChainParams) -> Result<Mat8> {
    if !(p.j.is_finite() && p.h.is_finite() && p.k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite chain parameters {p:?}"
        )));
    }
    let spin = |idx: usize, site: usize| (idx >> (3 - site)) & 1;
    let sz = |idx: usize, site: usize| 2.0 * spin(idx, site) as f64 - 1.0;
    let mut h = Mat8::zeros();
    for idx in 0..8 {
        h[(idx, idx)] = c(p.h * (1..=3).map(|s| sz(idx, s)).sum::<f64>());
        // σˣσˣ + σʸσʸ = 2(σ⁺σ⁻ + σ⁻σ⁺): hops an excitation between two sites.
        for (a, b) in [(1, 2), (2, 3)] {
            if spin(idx, a) != spin(idx, b) {
                let flipped = idx ^ (1 << (3 - a)) ^ (1 << (3 - b));
                h[(flipped, idx)] += c(2.0 * p.j);
            }
        }
        // The three-spin term hops between the end sites, signed by σ₂ᶻ.
        if spin(idx, 1) != spin(idx, 3) {
            let flipped = idx ^ 0b101;
            h[(flipped, idx)] += c(2.0 * p.k * sz(idx, 2));
        }
    }
    Ok(h)
}

pub fn analytic_eigensystem(p: &ChainParams) -> Spectrum {
    let (h, k) = (p.h, p.k);
    let a = MixingAngles::with_coupling(p.j, k);
    let b = a.b;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let k_ = |s: &str| basis_ket(s);
    let states = [
        k_("000"),
        k_("111"),
        (k_("011") - k_("110")) * c(r),
        (k_("001") - k_("100")) * c(r),
        k_("100") * c(r * a.sin_a1) + k_("010") * c(a.cos_a1) + k_("001") * c(r * a.sin_a1),
        k_("110") * c(r * a.sin_a2) - k_("101") * c(a.cos_a2) + k_("011") * c(r * a.sin_a2),
        k_("100") * c(r * a.sin_a2) + k_("010") * c(a.cos_a2) + k_("001") * c(r * a.sin_a2),
        k_("110") * c(r * a.sin_a1) - k_("101") * c(a.cos_a1) + k_("011") * c(r * a.sin_a1),
    ];
    let energies = [
        -3.0 * h,
        3.0 * h,
        h - 2.0 * k,
        -h + 2.0 * k,
        -h - k - b,
        h + k - b,
        -h - k + b,
        h + k + b,
    ];
    Spectrum {
        params: *p,
        energies,
        states,
        angles: a,
    }
}

/// Eigenpairs from direct diagonalisation, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct NumericSpectrum {
    pub energies: Vec<f64>,
    pub vectors: Mat8,
}

pub fn numeric_eigensystem(hamiltonian: &Mat8) -> Result<NumericSpectrum> {
    let err = hermiticity_error(hamiltonian);
    if err > 1e-12 * hamiltonian.norm().max(1.0) {
        return Err(Error::ContractViolation(format!(
            "matrix is not Hermitian (‖H − H†‖ = {err:e})"
        )));
    }
    let (energies, vectors) = eigh(hamiltonian);
    Ok(NumericSpectrum { energies, vectors })
}

/// Raw signed Bohr frequencies of the bath-coupled transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionFrequencies {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

pub fn transition_frequencies(p: &ChainParams) -> TransitionFrequencies {
    let b = MixingAngles::with_coupling(p.j, p.k).b;
    TransitionFrequencies {
        omega1: 2.0 * p.h - p.k - b,
        omega2: 2.0 * p.h - p.k + b,
        omega3: 2.0 * (p.h + p.k),
    }
}

/// ε₃ − ε₅ = 2h + (B − k).
pub fn energy_gap_35(p: &ChainParams) -> f64 {
    let b = MixingAngles::with_coupling(p.j, p.k).b;
    2.0 * p.h + (b - p.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn polarised_diagonal_element() {
        let h = build_hamiltonian(&ChainParams::new(2.0, 0.0).unwrap()).unwrap();
        assert_eq!(h[(0, 0)], c(-6.0));
    }

    #[test]
    fn xx_hopping_weight() {
        let h = build_hamiltonian(&ChainParams::new(0.0, 0.0).unwrap()).unwrap();
        // ⟨100|H|010⟩
        assert_eq!(h[(0b100, 0b010)], c(2.0));
    }

    #[test]
    fn non_finite_parameters_rejected() {
        assert!(ChainParams::new(f64::NAN, 1.0).is_err());
        assert!(ChainParams::new(1.0, f64::INFINITY).is_err());
        let bad = ChainParams {
            j: 1.0,
            h: f64::NAN,
            k: 0.0,
        };
        assert!(matches!(
            build_hamiltonian(&bad),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn negative_parameters_flagged_not_rejected() {
        let p = ChainParams::new(-1.0, 2.0).unwrap();
        assert!(!p.in_standard_regime());
    }

    #[test]
    fn mixing_angles_at_zero_k() {
        let a = mixing_angles(0.0);
        assert_abs_diff_eq!(a.b, 2.0 * SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.sin_a1, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.cos_a1, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.sin_a2, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a.cos_a2, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn mixing_angles_at_k4_match_numeric_eigenvector() {
        let a = mixing_angles(4.0);
        assert_abs_diff_eq!(a.b, 24f64.sqrt(), epsilon = 1e-14);
        // 2√2 / √(8 + (4 − √24)²)
        assert_abs_diff_eq!(a.sin_a1, 0.953_020_6, epsilon = 1e-6);
        // The φ₅ weight on |010⟩ is cos α₁; check against the numeric ground
        // state of the one-excitation sector at h = 0 (ε₅ is lowest there).
        let p = ChainParams::new(0.0, 4.0).unwrap();
        let num = numeric_eigensystem(&build_hamiltonian(&p).unwrap()).unwrap();
        let ground = num.vectors.column(0);
        assert_abs_diff_eq!(ground[0b010].norm(), a.cos_a1.abs(), epsilon = 1e-10);
        assert_abs_diff_eq!(
            ground[0b100].norm(),
            a.sin_a1 * FRAC_1_SQRT_2,
            epsilon = 1e-10
        );
    }

    #[test]
    fn mixing_angles_are_normalised_and_alpha_minus_is_right_angle() {
        for k in [-3.0, 0.0, 0.3, 1.0, 2.0, 7.5, 100.0] {
            let a = mixing_angles(k);
            assert!(a.b >= 2.0 * SQRT_2);
            assert_abs_diff_eq!(a.sin_a1.powi(2) + a.cos_a1.powi(2), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.sin_a2.powi(2) + a.cos_a2.powi(2), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                a.alpha1() - a.alpha2(),
                std::f64::consts::FRAC_PI_2,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn analytic_eigenvalues() {
        let s = analytic_eigensystem(&ChainParams::new(1.0, 2.0).unwrap());
        assert_abs_diff_eq!(s.energies[0], -3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.energies[4], -3.0 - 12f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.energies[4], -6.464102, epsilon = 1e-6);
    }

    #[test]
    fn analytic_states_are_eigenstates() {
        for (h, k) in [
            (0.0, 0.0),
            (1.0, 2.0),
            (3.0, 4.0),
            (0.5, 1.0),
            (6.0, 8.0),
            (2.0, -1.5),
        ] {
            let p = ChainParams::new(h, k).unwrap();
            let s = analytic_eigensystem(&p);
            let hm = build_hamiltonian(&p).unwrap();
            assert!(s.max_residual(&hm) < 1e-10, "(h,k)=({h},{k})");
            assert!(s.orthonormality_error() < 1e-10);
        }
    }

    #[test]
    fn general_coupling_closed_forms() {
        let p = ChainParams::with_coupling(0.7, 1.3, 2.1).unwrap();
        let s = analytic_eigensystem(&p);
        assert!(s.max_residual(&build_hamiltonian(&p).unwrap()) < 1e-10);
    }

    #[test]
    fn numeric_diagonal() {
        let mut h = Mat8::zeros();
        for i in 0..8 {
            h[(i, i)] = c(i as f64 + 1.0);
        }
        let s = numeric_eigensystem(&h).unwrap();
        for i in 0..8 {
            assert_abs_diff_eq!(s.energies[i], i as f64 + 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(s.vectors[(i, i)].norm(), 1.0, epsilon = 1e-14);
        }
        let z = numeric_eigensystem(&Mat8::zeros()).unwrap();
        assert!(z.energies.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn numeric_rejects_non_hermitian() {
        let mut h = Mat8::zeros();
        h[(0, 1)] = ONE;
        assert!(matches!(
            numeric_eigensystem(&h),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn numeric_matches_analytic_multiset() {
        let p = ChainParams::new(0.5, 1.5).unwrap();
        let num = numeric_eigensystem(&build_hamiltonian(&p).unwrap()).unwrap();
        let mut ana = analytic_eigensystem(&p).energies.to_vec();
        ana.sort_by(f64::total_cmp);
        for (a, b) in ana.iter().zip(num.energies.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn frequencies() {
        let f = transition_frequencies(&ChainParams::new(1.0, 0.0).unwrap());
        assert_abs_diff_eq!(f.omega1, 2.0 - 2.0 * SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(f.omega3, 2.0, epsilon = 1e-15);
        let f = transition_frequencies(&ChainParams::new(2.0, 1.0).unwrap());
        assert_abs_diff_eq!(f.omega2, 6.0, epsilon = 1e-14);
    }

    #[test]
    fn gap_values() {
        let gap = energy_gap_35(&ChainParams::new(1.0, 10.0).unwrap());
        assert_abs_diff_eq!(gap, 2.0 + 108f64.sqrt() - 10.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gap, 2.392305, epsilon = 1e-6);
        let gap0 = energy_gap_35(&ChainParams::new(0.0, 0.0).unwrap());
        assert_abs_diff_eq!(gap0, 2.0 * SQRT_2, epsilon = 1e-15);
        // agrees with the eigenvalue list
        let p = ChainParams::new(1.7, 3.2).unwrap();
        let s = analytic_eigensystem(&p);
        assert_abs_diff_eq!(
            energy_gap_35(&p),
            s.energies[2] - s.energies[4],
            epsilon = 1e-13
        );
    }
}
