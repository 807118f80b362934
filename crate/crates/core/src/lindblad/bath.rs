use serde::Serialize;

use crate::error::{Error, Result};

/// Frequencies at or below this are treated as degenerate.
pub const OMEGA_MIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Temperature {
    Finite(f64),
    /// Explicit zero-temperature bath: n(ω) = 0.
    Zero,
}

impl Temperature {
    pub fn value(&self) -> f64 {
        match *self {
            Temperature::Finite(t) => t,
            Temperature::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BathIndex {
    One,
    Three,
}

impl BathIndex {
    pub const BOTH: [BathIndex; 2] = [BathIndex::One, BathIndex::Three];

    /// The chain site the bath is attached to.
    pub fn site(self) -> usize {
        match self {
            BathIndex::One => 1,
            BathIndex::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bath {
    pub temperature: Temperature,
    /// Flat spectral decay rate.
    pub gamma: f64,
}

impl Bath {
    pub fn new(temperature: Temperature, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay rate must be positive, got {gamma}"
            )));
        }
        if let Temperature::Finite(t) = temperature {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bath temperature must be positive, got {t} (use the zero-temperature flag for T = 0)"
                )));
            }
        }
        Ok(Bath { temperature, gamma })
    }

    pub fn occupation(&self, omega: f64) -> Result<f64> {
        planck_occupation(omega, self.temperature)
    }
}

/// Baths attached to spins 1 and 3 (k_B = 1, energies in units of J).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathSpec {
    pub bath1: Bath,
    pub bath3: Bath,
}

impl BathSpec {
    pub fn new(t1: f64, t3: f64, gamma: f64) -> Result<Self> {
        Ok(BathSpec {
            bath1: Bath::new(Temperature::Finite(t1), gamma)?,
            bath3: Bath::new(Temperature::Finite(t3), gamma)?,
        })
    }

    /// T₁ = T_M + ΔT/2 (the hotter bath for ΔT > 0), T₃ = T_M − ΔT/2.
    pub fn from_mean(t_mean: f64, delta_t: f64, gamma: f64) -> Result<Self> {
        Self::new(t_mean + 0.5 * delta_t, t_mean - 0.5 * delta_t, gamma)
    }

    pub fn with_rates(t1: Temperature, gamma1: f64, t3: Temperature, gamma3: f64) -> Result<Self> {
        Ok(BathSpec {
            bath1: Bath::new(t1, gamma1)?,
            bath3: Bath::new(t3, gamma3)?,
        })
    }

    pub fn bath(&self, j: BathIndex) -> &Bath {
        match j {
            BathIndex::One => &self.bath1,
            BathIndex::Three => &self.bath3,
        }
    }

    pub fn t1(&self) -> f64 {
        self.bath1.temperature.value()
    }

    pub fn t3(&self) -> f64 {
        self.bath3.temperature.value()
    }

    pub fn min_gamma(&self) -> f64 {
        self.bath1.gamma.min(self.bath3.gamma)
    }
}

/// Mean thermal occupation 1/(e^{ω/T} − 1).
pub fn planck_occupation(omega: f64, temperature: Temperature) -> Result<f64> {
    if omega.is_nan() || omega <= OMEGA_MIN {
        return Err(Error::NearDegenerateFrequency {
            omega,
            detail: "Planck occupation evaluated at a non-positive frequency".into(),
        });
    }
    match temperature {
        Temperature::Zero => Ok(0.0),
        Temperature::Finite(t) if t > 0.0 => Ok(1.0 / (omega / t).exp_m1()),
        Temperature::Finite(t) => Err(Error::InvalidParameter(format!(
            "bath temperature must be positive, got {t}"
        ))),
    }
}
