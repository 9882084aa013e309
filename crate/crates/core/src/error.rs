use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The off-diagonal amplitude is too large for the populations.
    #[error("positivity violated: |a|^2 = {coherence_sq:.3e} exceeds p1(1-p1) = {bound:.3e}")]
    PositivityViolation { coherence_sq: f64, bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid qubit parameters: {0}")]
    InvalidParams(String),

    /// Bloch vector too short to define a rotation onto the ground axis.
    #[error("degenerate state: Bloch norm {norm:.3e} is below {threshold:.0e}")]
    DegenerateState { norm: f64, threshold: f64 },

    #[error("integration step {dt:.3e} s exceeds limit {limit:.3e} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("efficiency undefined: energy change and cost are both zero")]
    UndefinedEfficiency,

    #[error("need at least 2 repetitions for a standard error, got {0}")]
    InsufficientRepetitions(usize),

    #[error("maximizer hit the interval endpoint at {0}")]
    NoInteriorMax(f64),

    #[error("no sign change on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("integrator drift: {0}")]
    IntegratorDrift(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
