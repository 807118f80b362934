use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg::{c, Mat8, C64, I};

use super::bath::{BathIndex, BathSpec};
use super::jump::JumpOperatorSet;

/// One Lindblad channel: rate·(2LρL† − {ρ, L†L}).
#[derive(Debug, Clone)]
struct Channel {
    bath: BathIndex,
    rate: f64,
    l: Mat8,
    l_dag: Mat8,
    l_dag_l: Mat8,
}

impl Channel {
    fn apply(&self, rho: &Mat8) -> Mat8 {
        (self.l * rho * self.l_dag * c(2.0) - self.l_dag_l * rho - rho * self.l_dag_l)
            * c(self.rate)
    }
}

/// Generator of the secular master equation for fixed Hamiltonian, baths
/// and jump operators.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub hamiltonian: Mat8,
    channels: Vec<Channel>,
    min_gamma: f64,
}

impl Liouvillian {
    pub fn new(hamiltonian: &Mat8, baths: &BathSpec, ops: &JumpOperatorSet) -> Result<Self> {
        let mut channels = Vec::new();
        for j in BathIndex::BOTH {
            let bath = baths.bath(j);
            for op in ops.bath(j) {
                let n = bath.occupation(op.omega)?;
                if op.omega < 10.0 * bath.gamma {
                    log::warn!(
                        "bath {} transition frequency {:.3e} is below 10·γ; secular approximation is marginal",
                        j.site(),
                        op.omega
                    );
                }
                channels.push(Channel {
                    bath: j,
                    rate: bath.gamma * (1.0 + n),
                    l: op.a,
                    l_dag: op.a_dag,
                    l_dag_l: op.a_dag * op.a,
                });
                if n > 0.0 {
                    channels.push(Channel {
                        bath: j,
                        rate: bath.gamma * n,
                        l: op.a_dag,
                        l_dag: op.a,
                        l_dag_l: op.a * op.a_dag,
                    });
                }
            }
        }
        Ok(Liouvillian {
            hamiltonian: *hamiltonian,
            channels,
            min_gamma: baths.min_gamma(),
        })
    }

    /// Smallest bath decay rate; sets the relaxation time scale.
    pub fn min_gamma(&self) -> f64 {
        self.min_gamma
    }

    pub fn dissipator(&self, rho: &Mat8, j: BathIndex) -> Mat8 {
        self.channels
            .iter()
            .filter(|ch| ch.bath == j)
            .fold(Mat8::zeros(), |acc, ch| acc + ch.apply(rho))
    }

    pub fn dissipative_part(&self, rho: &Mat8) -> Mat8 {
        self.channels
            .iter()
            .fold(Mat8::zeros(), |acc, ch| acc + ch.apply(rho))
    }

    pub fn unitary_part(&self, rho: &Mat8) -> Mat8 {
        (self.hamiltonian * rho - rho * self.hamiltonian) * -I
    }

    /// dρ/dt.
    pub fn apply(&self, rho: &Mat8) -> Mat8 {
        self.unitary_part(rho) + self.dissipative_part(rho)
    }

    /// 64×64 superoperator acting on column-major vec(ρ).
    pub fn matrix(&self) -> DMatrix<C64> {
        self.superoperator(true)
    }

    /// Superoperator of the dissipators alone, i.e. the generator in the
    /// frame rotating with H. The secular dissipators commute with the
    /// unitary part, so this frame carries the full relaxation dynamics.
    pub fn dissipative_matrix(&self) -> DMatrix<C64> {
        self.superoperator(false)
    }

    fn superoperator(&self, with_unitary: bool) -> DMatrix<C64> {
        // vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
        let id = DMatrix::<C64>::identity(8, 8);
        let dyn8 = |m: &Mat8| DMatrix::from_column_slice(8, 8, m.as_slice());
        let mut m = DMatrix::<C64>::zeros(64, 64);
        if with_unitary {
            let h = dyn8(&self.hamiltonian);
            m += (id.kronecker(&h) - h.transpose().kronecker(&id)) * -I;
        }
        for ch in &self.channels {
            let l = dyn8(&ch.l);
            let ldl = dyn8(&ch.l_dag_l);
            let term = l.conjugate().kronecker(&l) * c(2.0)
                - id.kronecker(&ldl)
                - ldl.transpose().kronecker(&id);
            m += term * c(ch.rate);
        }
        m
    }
}

/// L_j(ρ) for a single bath.
pub fn dissipator(
    rho: &Mat8,
    j: BathIndex,
    ops: &JumpOperatorSet,
    baths: &BathSpec,
) -> Result<Mat8> {
    let bath = baths.bath(j);
    let mut out = Mat8::zeros();
    for op in ops.bath(j) {
        let n = bath.occupation(op.omega)?;
        let down = op.a * rho * op.a_dag * c(2.0) - op.a_dag * op.a * rho - rho * op.a_dag * op.a;
        let up = op.a_dag * rho * op.a * c(2.0) - op.a * op.a_dag * rho - rho * op.a * op.a_dag;
        out += down * c(bath.gamma * (1.0 + n)) + up * c(bath.gamma * n);
    }
    Ok(out)
}

/// −i[H, ρ] + L₁(ρ) + L₃(ρ).
pub fn liouvillian_apply(
    rho: &Mat8,
    hamiltonian: &Mat8,
    baths: &BathSpec,
    ops: &JumpOperatorSet,
) -> Result<Mat8> {
    let mut out = (hamiltonian * rho - rho * hamiltonian) * -I;
    for j in BathIndex::BOTH {
        out += dissipator(rho, j, ops, baths)?;
    }
    Ok(out)
}

pub fn liouvillian_matrix(
    hamiltonian: &Mat8,
    baths: &BathSpec,
    ops: &JumpOperatorSet,
) -> Result<DMatrix<C64>> {
    Ok(Liouvillian::new(hamiltonian, baths, ops)?.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, trace};
    use crate::lindblad::{build_jump_operators, gibbs_state, JumpMode};
    use crate::spectrum::{analytic_eigensystem, build_hamiltonian, ChainParams};
    use rand::{Rng, SeedableRng};

    struct Setup {
        h: Mat8,
        ops: JumpOperatorSet,
        baths: BathSpec,
    }

    fn setup(h: f64, k: f64, t1: f64, t3: f64, gamma: f64) -> Setup {
        let p = ChainParams::new(h, k).unwrap();
        let ops = build_jump_operators(&analytic_eigensystem(&p), JumpMode::Generic).unwrap();
        Setup {
            h: build_hamiltonian(&p).unwrap(),
            ops,
            baths: BathSpec::new(t1, t3, gamma).unwrap(),
        }
    }

    fn random_state(rng: &mut impl Rng) -> Mat8 {
        let g = Mat8::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rho = g * g.adjoint();
        rho / trace(&rho)
    }

    #[test]
    fn dissipator_is_traceless_and_hermitian() {
        let s = setup(1.0, 2.0, 1.6, 0.8, 0.05);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let rho = random_state(&mut rng);
            for j in BathIndex::BOTH {
                let d = dissipator(&rho, j, &s.ops, &s.baths).unwrap();
                assert!(trace(&d).norm() < 1e-13);
                assert!(hermiticity_error(&d) < 1e-13);
            }
        }
    }

    #[test]
    fn gibbs_state_is_annihilated_at_equal_temperatures() {
        let s = setup(1.0, 4.0, 1.0, 1.0, 0.01);
        let gibbs = gibbs_state(&s.h, 1.0);
        let total = dissipator(&gibbs, BathIndex::One, &s.ops, &s.baths).unwrap()
            + dissipator(&gibbs, BathIndex::Three, &s.ops, &s.baths).unwrap();
        assert!(total.norm() < 1e-10, "{}", total.norm());
    }

    #[test]
    fn apply_is_traceless_and_reduces_to_commutator_without_damping() {
        let s = setup(3.0, 4.0, 1.6, 0.8, 0.01);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let rho = random_state(&mut rng);
        let out = liouvillian_apply(&rho, &s.h, &s.baths, &s.ops).unwrap();
        assert!(trace(&out).norm() < 1e-13);

        let gen = Liouvillian::new(&s.h, &s.baths, &s.ops).unwrap();
        assert!((gen.apply(&rho) - out).norm() < 1e-13);

        let undamped = JumpOperatorSet::default();
        let out = liouvillian_apply(&rho, &s.h, &s.baths, &undamped).unwrap();
        assert_eq!(out, (s.h * rho - rho * s.h) * -I);
    }

    #[test]
    fn superoperator_matches_direct_application() {
        let s = setup(3.0, 4.0, 1.6, 0.8, 0.01);
        let gen = Liouvillian::new(&s.h, &s.baths, &s.ops).unwrap();
        let m = gen.matrix();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let rho = random_state(&mut rng);
            let v = DMatrix::from_column_slice(64, 1, rho.as_slice());
            let mv = &m * v;
            let direct = liouvillian_apply(&rho, &s.h, &s.baths, &s.ops).unwrap();
            let diff = (Mat8::from_column_slice(mv.as_slice()) - direct).norm();
            assert!(diff < 1e-12, "{diff}");
        }
    }

    #[test]
    fn superoperator_spectrum_is_contractive_with_a_stationary_mode() {
        let s = setup(3.0, 4.0, 1.6, 0.8, 0.01);
        let m = liouvillian_matrix(&s.h, &s.baths, &s.ops).unwrap();
        let schur = m.schur();
        let (_, t) = schur.unpack();
        let eigs: Vec<C64> = (0..64).map(|i| t[(i, i)]).collect();
        assert!(eigs.iter().any(|z| z.norm() < 1e-9));
        assert!(eigs.iter().all(|z| z.re <= 1e-9));
    }
}
