//! Quantum discord by deterministic grid search over projective
//! measurements on spin B.
//!
//! A measurement is the orthonormal pair
//! |θ₁⟩ = cos θ|0⟩ + e^{iφ} sin θ|1⟩, |θ₂⟩ = e^{−iφ} sin θ|0⟩ − cos θ|1⟩.
//! Shifting θ by π/2 only swaps the two outcomes, so θ ∈ [0, π/2] and
//! φ ∈ [0, 2π) cover every measurement.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{kron, Mat2, Mat4, C64};

use super::entropy::{entropy_of_spectrum, mutual_information, von_neumann_entropy};
use super::reduce::reduce_a;

pub const COARSE_THETA: usize = 48;
pub const COARSE_PHI: usize = 96;
pub const ZOOM_ROUNDS: usize = 5;
/// Points per axis in each zoom window.
const ZOOM_POINTS: usize = 9;
/// Number of distinct coarse-grid basins refined.
const ZOOM_STARTS: usize = 4;
const CONVERGED: f64 = 1e-10;
const MIN_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementAngles {
    /// Folds the angles into θ ∈ [0, π), φ ∈ [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Self {
        MeasurementAngles {
            theta: theta.rem_euclid(PI),
            phi: phi.rem_euclid(2.0 * PI),
        }
    }
}

/// (|θ₁⟩, |θ₂⟩) for the given angles.
pub fn measurement_basis(angles: &MeasurementAngles) -> (Vector2<C64>, Vector2<C64>) {
    let (s, c) = angles.theta.sin_cos();
    let phase = C64::from_polar(1.0, angles.phi);
    let first = Vector2::new(C64::new(c, 0.0), phase * s);
    let second = Vector2::new(phase.conj() * s, C64::new(-c, 0.0));
    (first, second)
}

fn entropy2(m: &Mat2) -> f64 {
    // closed-form spectrum of a 2×2 Hermitian matrix
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d).powi(2) + b * b).sqrt();
    entropy_of_spectrum(&[(mean + half_gap).max(0.0), (mean - half_gap).max(0.0)]).unwrap_or(0.0)
}

/// S_Π(A|B) = Σⱼ qⱼ S(ρ_Aʲ) for the projective measurement on B.
pub fn conditional_entropy_measured(rho: &Mat4, angles: &MeasurementAngles) -> f64 {
    let (first, second) = measurement_basis(angles);
    let id = Mat2::identity();
    let mut total = 0.0;
    for ket in [first, second] {
        let proj: Mat4 = kron(&id, &(ket * ket.adjoint()));
        let post = proj * rho * proj;
        let unnormalised = reduce_a(&post);
        let q = (unnormalised[(0, 0)] + unnormalised[(1, 1)]).re;
        if q < MIN_PROBABILITY {
            continue;
        }
        total += q * entropy2(&(unnormalised / C64::new(q, 0.0)));
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub angles: MeasurementAngles,
}

struct Grid {
    theta_lo: f64,
    theta_step: f64,
    phi_lo: f64,
    phi_step: f64,
    n_theta: usize,
    n_phi: usize,
}

impl Grid {
    fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.theta_lo + i as f64 * self.theta_step,
            self.phi_lo + j as f64 * self.phi_step,
        )
    }

    /// Minimum over the grid, scanning θ-major so ties resolve toward
    /// smaller θ, then smaller φ.
    fn argmin(&self, f: &impl Fn(f64, f64) -> f64) -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                let (t, p) = self.point(i, j);
                let v = f(t, p);
                if v < best.0 {
                    best = (v, t, p);
                }
            }
        }
        best
    }
}

/// Minimises the measured conditional entropy: a coarse 48×96 scan followed
/// by five zoom rounds around each of the best coarse basins.
pub fn optimize_measurement(rho: &Mat4) -> (MeasurementAngles, f64) {
    let f =
        |t: f64, p: f64| conditional_entropy_measured(rho, &MeasurementAngles { theta: t, phi: p });
    let coarse = Grid {
        theta_lo: 0.0,
        theta_step: FRAC_PI_2 / (COARSE_THETA - 1) as f64,
        phi_lo: 0.0,
        phi_step: 2.0 * PI / COARSE_PHI as f64,
        n_theta: COARSE_THETA,
        n_phi: COARSE_PHI,
    };
    let mut values = vec![0.0; COARSE_THETA * COARSE_PHI];
    for i in 0..COARSE_THETA {
        for j in 0..COARSE_PHI {
            let (t, p) = coarse.point(i, j);
            values[i * COARSE_PHI + j] = f(t, p);
        }
    }
    let starts = coarse_basins(&values, ZOOM_STARTS);

    let mut best: Option<(f64, f64, f64)> = None;
    for idx in starts {
        let (mut t, mut p) = coarse.point(idx / COARSE_PHI, idx % COARSE_PHI);
        let mut value = values[idx];
        let (mut half_t, mut half_p) = (coarse.theta_step, coarse.phi_step);
        for _ in 0..ZOOM_ROUNDS {
            let window = Grid {
                theta_lo: t - half_t,
                theta_step: 2.0 * half_t / (ZOOM_POINTS - 1) as f64,
                phi_lo: p - half_p,
                phi_step: 2.0 * half_p / (ZOOM_POINTS - 1) as f64,
                n_theta: ZOOM_POINTS,
                n_phi: ZOOM_POINTS,
            };
            let (v, nt, np) = window.argmin(&f);
            let improvement = value - v;
            if v < value {
                value = v;
                t = nt;
                p = np;
            }
            half_t /= 4.0;
            half_p /= 4.0;
            if improvement.abs() < CONVERGED
                && improvement >= 0.0
                && half_t < coarse.theta_step / 16.0
            {
                break;
            }
        }
        if best.is_none_or(|b| value < b.0) {
            best = Some((value, t, p));
        }
    }
    let (value, t, p) = best.expect("at least one start");
    (fold_angles(t, p), value)
}

/// Canonical representative of the measurement with θ ∈ [0, π/2].
fn fold_angles(theta: f64, phi: f64) -> MeasurementAngles {
    let a = MeasurementAngles::new(theta, phi);
    if a.theta > FRAC_PI_2 {
        // |θ + π/2⟩ is the second outcome of the same measurement
        MeasurementAngles::new(a.theta - FRAC_PI_2, a.phi)
    } else {
        a
    }
}

/// Indices of up to `count` coarse local minima (periodic in φ), best first.
fn coarse_basins(values: &[f64], count: usize) -> Vec<usize> {
    let at = |i: isize, j: isize| -> Option<f64> {
        if i < 0 || i >= COARSE_THETA as isize {
            return None;
        }
        let j = j.rem_euclid(COARSE_PHI as isize);
        Some(values[i as usize * COARSE_PHI + j as usize])
    };
    let mut minima: Vec<usize> = Vec::new();
    for i in 0..COARSE_THETA as isize {
        for j in 0..COARSE_PHI as isize {
            let v = at(i, j).unwrap();
            let is_min = (-1..=1)
                .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
                .filter(|&d| d != (0, 0))
                .all(|(di, dj)| at(i + di, j + dj).is_none_or(|n| v <= n));
            if is_min {
                minima.push(i as usize * COARSE_PHI + j as usize);
            }
        }
    }
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    minima.truncate(count);
    if minima.is_empty() {
        let best = (0..values.len())
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap();
        minima.push(best);
    }
    minima
}

/// D = I(A:B) − max_Π [S(ρ_A) − S_Π(A|B)].
pub fn quantum_discord(rho: &Mat4) -> Result<DiscordResult> {
    let mutual = mutual_information(rho)?;
    let s_a = von_neumann_entropy(&reduce_a(rho))?;
    let (angles, conditional) = optimize_measurement(rho);
    let classical = s_a - conditional;
    Ok(DiscordResult {
        discord: mutual - classical,
        classical_correlation: classical,
        mutual_information: mutual,
        angles,
    })
}

pub fn classical_correlation(rho: &Mat4) -> Result<f64> {
    Ok(quantum_discord(rho)?.classical_correlation)
}
