use crate::linalg::{c, eigh, kron, sigma_y, Mat4};

/// Eigenvalues of ρ below this are roundoff and are dropped before taking
/// the square root.
const RANK_FLOOR: f64 = 1e-14;

/// Wootters concurrence max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}, where λᵢ are the
/// eigenvalues of ρ(σʸ⊗σʸ)ρ*(σʸ⊗σʸ) in decreasing order.
///
/// √λᵢ are taken directly as the singular values of √ρ (σʸ⊗σʸ) √ρ*, which
/// avoids square roots of roundoff-level eigenvalues.
pub fn concurrence(rho: &Mat4) -> f64 {
    let yy: Mat4 = kron(&sigma_y(), &sigma_y());
    let (values, vectors) = eigh(rho);
    let mut root = Mat4::zeros();
    for (k, &p) in values.iter().enumerate() {
        if p > RANK_FLOOR {
            let v = vectors.column(k);
            root += v * v.adjoint() * c(p.sqrt());
        }
    }
    let mut s: Vec<f64> = (root * yy * root.conjugate())
        .singular_values()
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}
