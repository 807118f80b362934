//! Small dense complex linear algebra shared by the rest of the crate.
//!
//! Basis convention: single-spin index 0 is |0⟩ (σ_z = −1) and index 1 is
//! |1⟩ (σ_z = +1). Three-spin states |n₁n₂n₃⟩ are stored at index
//! 4n₁ + 2n₂ + n₃, so spin 1 is the most significant bit.

use nalgebra::{DMatrix, SMatrix};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub type Mat2 = SMatrix<C64, 2, 2>;
pub type Mat4 = SMatrix<C64, 4, 4>;
pub type Mat8 = SMatrix<C64, 8, 8>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

/// σ_y in the (|0⟩, |1⟩) ordering, consistent with [σ_x, σ_y] = 2iσ_z.
pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, I, -I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(-ONE, ZERO, ZERO, ONE)
}

/// σ_x acting on `spin` (1-based) of the three-spin register.
pub fn sigma_x_on(spin: usize) -> Mat8 {
    assert!((1..=3).contains(&spin), "spin index out of range");
    let bit = 1 << (3 - spin);
    let mut m = Mat8::zeros();
    for idx in 0..8 {
        m[(idx ^ bit, idx)] = ONE;
    }
    m
}

pub fn hermitize<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    (m + m.adjoint()) * c(0.5)
}

pub fn trace<const N: usize>(m: &SMatrix<C64, N, N>) -> C64 {
    (0..N).map(|i| m[(i, i)]).sum()
}

/// Largest entrywise deviation from Hermiticity, measured in Frobenius norm.
pub fn hermiticity_error<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn to_dyn<const N: usize>(m: &SMatrix<C64, N, N>) -> DMatrix<C64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
/// Columns of the returned matrix are the matching eigenvectors.
pub fn eigh_dyn(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigh<const N: usize>(m: &SMatrix<C64, N, N>) -> (Vec<f64>, SMatrix<C64, N, N>) {
    let (values, vectors) = eigh_dyn(&to_dyn(&hermitize(m)));
    (values, SMatrix::from_column_slice(vectors.as_slice()))
}

pub fn eigvalsh<const N: usize>(m: &SMatrix<C64, N, N>) -> Vec<f64> {
    let mut values: Vec<f64> = to_dyn(&hermitize(m))
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eigenvalue<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    eigvalsh(m)[0]
}

/// ½‖a − b‖₁ for Hermitian arguments.
/// Checks Hermiticity and unit trace to `tol`, and positivity to −10·tol.
pub fn validate_state<const N: usize>(rho: &SMatrix<C64, N, N>, tol: f64) -> Result<()> {
    let herm = hermiticity_error(rho);
    let tr = (trace(rho) - c(1.0)).norm();
    let min = min_eigenvalue(rho);
    if !(herm <= tol && tr <= tol && min >= -10.0 * tol) {
        return Err(Error::InvalidState(format!(
            "not a density matrix (hermiticity {herm:e}, trace error {tr:e}, min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

pub fn trace_distance<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> f64 {
    0.5 * eigvalsh(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// Hermitize, zero out negative eigenvalues and restore unit trace.
pub fn clamp_to_state<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let (values, vectors) = eigh(m);
    let clamped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let mut out = SMatrix::<C64, N, N>::zeros();
    for (k, &p) in clamped.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        out += v * v.adjoint() * c(p / total);
    }
    out
}

/// Positive square root of a positive-semidefinite Hermitian matrix.
pub fn sqrt_psd<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let (values, vectors) = eigh(m);
    let mut out = SMatrix::<C64, N, N>::zeros();
    for (k, &p) in values.iter().enumerate() {
        let v = vectors.column(k);
        out += v * v.adjoint() * c(p.max(0.0).sqrt());
    }
    out
}

pub fn outer<const N: usize>(a: &SMatrix<C64, N, 1>, b: &SMatrix<C64, N, 1>) -> SMatrix<C64, N, N> {
    a * b.adjoint()
}

pub fn kron<const A: usize, const B: usize, const AB: usize>(
    a: &SMatrix<C64, A, A>,
    b: &SMatrix<C64, B, B>,
) -> SMatrix<C64, AB, AB> {
    assert_eq!(A * B, AB);
    SMatrix::from_fn(|r, col| a[(r / B, col / B)] * b[(r % B, col % B)])
}
