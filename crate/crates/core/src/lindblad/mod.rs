//! Secular Lindblad dynamics of the chain coupled to two thermal baths.
//!
//! dρ/dt = −i[H, ρ] + L₁(ρ) + L₃(ρ), where bath j couples through σⱼˣ and
//! each Lⱼ is a sum over positive Bohr frequencies ω of emission
//! (rate γ(1 + n(ω)), jump A(ω)) and absorption (rate γ n(ω), jump A(ω)†).

mod bath;
mod evolve;
mod generator;
mod jump;
mod steady;

pub use bath::{planck_occupation, Bath, BathIndex, BathSpec, Temperature, OMEGA_MIN};
pub use evolve::{evolve_rk4, suggested_dt, Frame, Rk4Options, Sample, Trajectory};
pub use generator::{dissipator, liouvillian_apply, liouvillian_matrix, Liouvillian};
pub use jump::{build_jump_operators, JumpMode, JumpOp, JumpOperatorSet, FREQ_TOL};
pub use steady::{
    gibbs_state, occupation_probabilities, relax_rk4, solve_point, steady_state, PointSolution,
    RelaxOptions, SteadyMethod, SteadyState, DEFAULT_T_MAX_GAMMA,
};
