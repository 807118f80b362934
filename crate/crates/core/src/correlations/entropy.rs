use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, Mat4, C64};

use super::reduce::{reduce_a, reduce_b};

/// S(ρ) = −Σ λ log₂ λ.
pub fn von_neumann_entropy<const N: usize>(rho: &SMatrix<C64, N, N>) -> Result<f64> {
    entropy_of_spectrum(&eigvalsh(rho))
}

pub(crate) fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -1e-6 {
            return Err(Error::InvalidState(format!("negative eigenvalue {v:e}")));
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s)
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB).
pub fn mutual_information(rho: &Mat4) -> Result<f64> {
    Ok(
        von_neumann_entropy(&reduce_a(rho))? + von_neumann_entropy(&reduce_b(rho))?
            - von_neumann_entropy(rho)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron, Mat2, ONE, ZERO};

    fn bell_phi_plus() -> Mat4 {
        let mut m = Mat4::zeros();
        for &(r, col) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, col)] = c(0.5);
        }
        m
    }

    #[test]
    fn entropies() {
        assert!((von_neumann_entropy(&(Mat4::identity() / c(4.0))).unwrap() - 2.0).abs() < 1e-14);
        assert!(von_neumann_entropy(&bell_phi_plus()).unwrap().abs() < 1e-14);
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(c(0.5), c(0.25), c(0.25), ZERO));
        assert!((von_neumann_entropy(&d).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn negative_spectrum_rejected() {
        let d = Mat2::new(c(1.1), ZERO, ZERO, c(-0.1));
        assert!(matches!(
            von_neumann_entropy(&d),
            Err(Error::InvalidState(_))
        ));
        // tiny drift is clamped
        let d = Mat2::new(c(1.0 + 1e-10), ZERO, ZERO, c(-1e-10));
        assert!(von_neumann_entropy(&d).unwrap().abs() < 1e-8);
    }

    #[test]
    fn mutual_information_cases() {
        let a = Mat2::new(c(0.7), c(0.1), c(0.1), c(0.3));
        let b = Mat2::new(c(0.4), C64::new(0.0, 0.2), C64::new(0.0, -0.2), c(0.6));
        let prod: Mat4 = kron(&a, &b);
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell_phi_plus()).unwrap() - 2.0).abs() < 1e-12);
        let _ = ONE;
    }

    #[test]
    fn werner_mutual_information_matches_spectrum() {
        let p: f64 = 0.8;
        let mut psi = Mat4::zeros();
        psi[(1, 1)] = c(0.5);
        psi[(2, 2)] = c(0.5);
        psi[(1, 2)] = c(-0.5);
        psi[(2, 1)] = c(-0.5);
        let w = psi * c(p) + Mat4::identity() * c((1.0 - p) / 4.0);
        let big = (1.0 + 3.0 * p) / 4.0;
        let small = (1.0 - p) / 4.0;
        let s_joint = -big * big.log2() - 3.0 * small * small.log2();
        let expected = 2.0 - s_joint;
        assert!((mutual_information(&w).unwrap() - expected).abs() < 1e-12);
    }
}
