//! Non-equilibrium steady state.

use crate::error::{Error, Result};
use crate::linalg::{c, clamp_to_state, eigh, hermitize, trace, Mat8};
use crate::spectrum::{analytic_eigensystem, build_hamiltonian, ChainParams, Spectrum};

use super::bath::BathSpec;
use super::evolve::{check_state, Frame, Rk4, Sample, STABILITY_LIMIT};
use super::generator::Liouvillian;
use super::jump::{build_jump_operators, JumpMode, JumpOperatorSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SteadyMethod {
    Nullspace,
    Rk4,
}

impl std::str::FromStr for SteadyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nullspace" => Ok(SteadyMethod::Nullspace),
            "rk4" => Ok(SteadyMethod::Rk4),
            other => Err(Error::InvalidParameter(format!(
                "unknown steady-state method {other:?}"
            ))),
        }
    }
}

/// Singular values of the Liouvillian below this count as stationary modes.
const NULL_TOL: f64 = 1e-9;

/// Default relaxation horizon in units of 1/γ.
pub const DEFAULT_T_MAX_GAMMA: f64 = 2000.0;

/// Relaxation settings for the RK4 route.
#[derive(Debug, Clone)]
pub struct RelaxOptions {
    /// Step size; `None` picks 0.05 / spectral radius of the rotating-frame
    /// generator.
    pub dt: Option<f64>,
    /// Give up after this time; `None` means 2000/γ. Cold-bath points have
    /// relaxation modes slowed by Boltzmann factors, and 50/γ is not enough there.
    pub t_max: Option<f64>,
    /// Stop once ‖dρ/dt‖_F drops below this.
    pub tol: f64,
    /// Steps between residual checks (and recorded samples).
    pub check_every: usize,
    /// Initial state; `None` is the maximally mixed state.
    pub rho0: Option<Mat8>,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            dt: None,
            t_max: None,
            tol: 1e-12,
            check_every: 200,
            rho0: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Mat8,
    /// ‖L(ρ)‖_F of the returned state.
    pub residual: f64,
    pub method: SteadyMethod,
    /// RK4 only: relaxation time reached.
    pub t_final: f64,
    /// RK4 only: states at every residual check.
    pub samples: Vec<Sample>,
}

pub fn steady_state(gen: &Liouvillian, method: SteadyMethod) -> Result<SteadyState> {
    match method {
        SteadyMethod::Nullspace => nullspace(gen),
        SteadyMethod::Rk4 => relax_rk4(gen, &RelaxOptions::default()),
    }
}

fn nullspace(gen: &Liouvillian) -> Result<SteadyState> {
    let svd = gen.matrix().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let dim = svd
        .singular_values
        .iter()
        .filter(|&&s| s < NULL_TOL)
        .count();
    if dim > 1 {
        return Err(Error::NonUniqueSteadyState { dim });
    }
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v: Vec<_> = v_t.row(idx).iter().map(|z| z.conj()).collect();
    let raw = Mat8::from_column_slice(&v);
    let tr = trace(&raw);
    if tr.norm() < 1e-12 {
        return Err(Error::Integration("null vector has vanishing trace".into()));
    }
    let rho = clamp_to_state(&hermitize(&(raw / tr)));
    Ok(SteadyState {
        residual: gen.apply(&rho).norm(),
        rho,
        method: SteadyMethod::Nullspace,
        t_final: f64::INFINITY,
        samples: Vec::new(),
    })
}

/// Relaxes to the steady state with RK4 in the frame co-rotating with H.
///
/// The secular dissipators are covariant under the free evolution, so the
/// rotating-frame trajectory differs from the lab-frame one only by
/// e^{−iHt}·e^{iHt}, and both share the same fixed point. Dropping the
/// commutator removes the stiff O(ε) oscillations that would otherwise force
/// dt ~ 1/ε over a relaxation time ~ 1/γ.
pub fn relax_rk4(gen: &Liouvillian, opts: &RelaxOptions) -> Result<SteadyState> {
    let rho0 = opts.rho0.unwrap_or_else(|| Mat8::identity() / c(8.0));
    check_state(&rho0)?;
    let dt = match opts.dt {
        Some(dt) => dt,
        None => Rk4::radius_dt(&gen.dissipative_matrix(), 0.5 * STABILITY_LIMIT),
    };
    let t_max = opts.t_max.unwrap_or(DEFAULT_T_MAX_GAMMA / gen.min_gamma());
    let check_every = opts.check_every.max(1);
    let stepper = Rk4::new(gen, Frame::Rotating, dt)?;

    let mut rho = rho0;
    let mut samples = vec![Sample::new(0.0, rho)];
    let mut steps = 0usize;
    let mut residual = gen.apply(&rho).norm();
    while residual >= opts.tol {
        let t = steps as f64 * dt;
        if t >= t_max {
            return Err(Error::Convergence { t_max, residual });
        }
        for _ in 0..check_every {
            stepper.step(&mut rho);
        }
        steps += check_every;
        let s = Sample::new(steps as f64 * dt, rho);
        if s.min_eigenvalue < -1e-6 {
            return Err(Error::Integration(format!(
                "positivity lost at t = {}: min eigenvalue {:e}",
                s.t, s.min_eigenvalue
            )));
        }
        samples.push(s);
        residual = gen.apply(&rho).norm();
    }
    Ok(SteadyState {
        rho,
        residual,
        method: SteadyMethod::Rk4,
        t_final: steps as f64 * dt,
        samples,
    })
}

/// e^{−H/T}/Z.
pub fn gibbs_state(hamiltonian: &Mat8, temperature: f64) -> Mat8 {
    let (energies, vectors) = eigh(hamiltonian);
    let e0 = energies[0];
    let weights: Vec<f64> = energies
        .iter()
        .map(|e| (-(e - e0) / temperature).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let mut rho = Mat8::zeros();
    for (i, w) in weights.iter().enumerate() {
        let v = vectors.column(i);
        rho += v * v.adjoint() * c(w / z);
    }
    rho
}

/// P_l = ⟨φ_l|ρ|φ_l⟩ in label order.
pub fn occupation_probabilities(rho: &Mat8, spec: &Spectrum) -> [f64; 8] {
    let mut p = [0.0; 8];
    for (l, v) in spec.states.iter().enumerate() {
        p[l] = (v.adjoint() * rho * v)[(0, 0)].re.max(0.0);
    }
    p
}

/// Everything computed for one (h, k, baths) point.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub spectrum: Spectrum,
    pub jump_ops: JumpOperatorSet,
    pub generator: Liouvillian,
    pub steady: SteadyState,
}

/// Spectrum → jump operators → Liouvillian → steady state.
pub fn solve_point(
    params: &ChainParams,
    baths: &BathSpec,
    method: SteadyMethod,
    mode: JumpMode,
) -> Result<PointSolution> {
    let spectrum = analytic_eigensystem(params);
    let jump_ops = build_jump_operators(&spectrum, mode)?;
    let generator = Liouvillian::new(&build_hamiltonian(params)?, baths, &jump_ops)?;
    let steady = steady_state(&generator, method)?;
    Ok(PointSolution {
        spectrum,
        jump_ops,
        generator,
        steady,
    })
}
