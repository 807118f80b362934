use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("near-degenerate transition frequency {omega:e} ({detail}); secular approximation breaks down")]
    NearDegenerateFrequency { omega: f64, detail: String },

    #[error(
        "analytic jump operators are ambiguous at k = {k} (omega_2 = omega_3); use generic mode"
    )]
    AnalyticCollision { k: f64 },

    #[error("step size dt = {dt:e} violates the stability guard; use dt <= {suggested:e}")]
    StepSize { dt: f64, suggested: f64 },

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("steady state is not unique: {dim} Liouvillian modes below tolerance")]
    NonUniqueSteadyState { dim: usize },

    #[error("steady-state integration did not converge by t = {t_max}; residual {residual:e}")]
    Convergence { t_max: f64, residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures map to exit code 2 in the CLI; everything else is a
    /// usage problem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NearDegenerateFrequency { .. }
                | Error::AnalyticCollision { .. }
                | Error::StepSize { .. }
                | Error::Integration(_)
                | Error::NonUniqueSteadyState { .. }
                | Error::Convergence { .. }
                | Error::InvalidState(_)
        )
    }
}
