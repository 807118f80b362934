//! Fixed-step classic RK4 for the master equation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermiticity_error, hermitize, min_eigenvalue, trace, validate_state, Mat8, C64,
};

use super::generator::Liouvillian;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// dρ/dt = −i[H, ρ] + L₁(ρ) + L₃(ρ).
    Lab,
    /// Frame co-rotating with H: only the dissipators remain. Eigenbasis
    /// populations, trace and spectrum of ρ coincide with the lab frame.
    Rotating,
}

impl std::str::FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lab" => Ok(Frame::Lab),
            "rotating" => Ok(Frame::Rotating),
            other => Err(Error::InvalidParameter(format!(
                "unknown frame {other:?} (expected lab or rotating)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Rk4Options {
    pub dt: f64,
    pub steps: usize,
    pub sample_every: usize,
    pub frame: Frame,
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub rho: Mat8,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Sample {
    pub(crate) fn new(t: f64, rho: Mat8) -> Self {
        Sample {
            t,
            trace_error: (trace(&rho) - c(1.0)).norm(),
            hermiticity_error: hermiticity_error(&rho),
            min_eigenvalue: min_eigenvalue(&rho),
            rho,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

/// Stability guard: dt times the spectral radius of the generator.
pub(crate) const STABILITY_LIMIT: f64 = 0.1;

/// Upper bound on the largest |λ| of a superoperator: min(‖M‖₁, ‖M‖_∞).
pub(crate) fn spectral_radius(m: &DMatrix<C64>) -> f64 {
    let max_row = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let max_col = m
        .column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    max_row.min(max_col)
}

pub(crate) fn default_dt(radius: f64) -> f64 {
    0.01 / radius.max(1.0)
}

/// Step size suggested for `gen` in `frame`: comfortably inside the guard.
pub fn suggested_dt(gen: &Liouvillian, frame: Frame) -> f64 {
    let m = match frame {
        Frame::Lab => gen.matrix(),
        Frame::Rotating => gen.dissipative_matrix(),
    };
    Rk4::radius_dt(&m, 0.5 * STABILITY_LIMIT)
}

pub(crate) fn check_state(rho: &Mat8) -> Result<()> {
    validate_state(rho, 1e-10)
}

/// Classic RK4 for the linear generator M. For dv/dt = Mv the four stages
/// collapse to v ← (1 + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24) v, so the stage
/// polynomial is assembled once and each step is a single mat-vec.
pub(crate) struct Rk4 {
    /// Row-major step matrix.
    step: Vec<C64>,
}

impl Rk4 {
    pub(crate) fn new(gen: &Liouvillian, frame: Frame, dt: f64) -> Result<Self> {
        let m = match frame {
            Frame::Lab => gen.matrix(),
            Frame::Rotating => gen.dissipative_matrix(),
        };
        let radius = spectral_radius(&m);
        if !(dt > 0.0 && dt.is_finite()) || dt * radius >= STABILITY_LIMIT {
            return Err(Error::StepSize {
                dt,
                suggested: default_dt(radius),
            });
        }
        let hm = m * c(dt);
        let id = DMatrix::<C64>::identity(64, 64);
        // Horner: 1 + hM(1 + hM/2(1 + hM/3(1 + hM/4)))
        let mut p = &id + &hm * c(0.25);
        p = &id + (&hm * p) * c(1.0 / 3.0);
        p = &id + (&hm * p) * c(0.5);
        p = &id + &hm * p;
        let step = (0..64)
            .flat_map(|r| (0..64).map(move |col| (r, col)))
            .map(|(r, col)| p[(r, col)])
            .collect();
        Ok(Rk4 { step })
    }

    pub(crate) fn radius_dt(m: &DMatrix<C64>, target: f64) -> f64 {
        target / spectral_radius(m).max(f64::MIN_POSITIVE)
    }

    /// Advances `rho` by one step, then re-Hermitises and restores unit trace.
    pub(crate) fn step(&self, rho: &mut Mat8) {
        let v = rho.as_slice();
        let mut next = [C64::new(0.0, 0.0); 64];
        for (r, out) in next.iter_mut().enumerate() {
            let row = &self.step[r * 64..(r + 1) * 64];
            *out = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        let stepped = hermitize(&Mat8::from_column_slice(&next));
        *rho = stepped / c(trace(&stepped).re);
    }
}

/// Integrates from `rho0`, sampling at t = 0 and every `sample_every` steps.
pub fn evolve_rk4(gen: &Liouvillian, rho0: &Mat8, opts: &Rk4Options) -> Result<Trajectory> {
    check_state(rho0)?;
    if opts.sample_every == 0 {
        return Err(Error::InvalidParameter(
            "sample_every must be at least 1".into(),
        ));
    }
    let stepper = Rk4::new(gen, opts.frame, opts.dt)?;
    let mut rho = *rho0;
    let mut traj = Trajectory {
        samples: vec![Sample::new(0.0, rho)],
    };
    for n in 1..=opts.steps {
        stepper.step(&mut rho);
        if n % opts.sample_every == 0 {
            let s = Sample::new(n as f64 * opts.dt, rho);
            if s.min_eigenvalue < -1e-6 {
                return Err(Error::Integration(format!(
                    "positivity lost at t = {}: min eigenvalue {:e}",
                    s.t, s.min_eigenvalue
                )));
            }
            traj.samples.push(s);
        }
    }
    Ok(traj)
}
