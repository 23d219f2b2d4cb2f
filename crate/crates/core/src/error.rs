use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("singular Liouvillian: {0}")]
    Singular(String),

    #[error("velocity |v_z| = {velocity:e} below resolved minimum {v_min:e}")]
    DegenerateVelocity { velocity: f64, v_min: f64 },

    #[error(
        "velocity quadrature did not converge: estimate {estimate:e}, refined {refined:e} \
         (relative change {rel_change:.3e})"
    )]
    QuadratureNotConverged { estimate: f64, refined: f64, rel_change: f64 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    #[error("invalid velocity distribution: {0}")]
    InvalidDistribution(String),

    #[error("spectrum error: {0}")]
    Spectrum(String),

    #[error("extremum at {position:e} is not resolved by the detuning grid")]
    UnresolvedCusp { position: f64 },

    #[error("power-law fit needs at least {needed} points in range, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("non-positive value {value:e} at x = {x:e} in power-law fit")]
    NonPositiveFeature { x: f64, value: f64 },

    #[error("ODE oracle step size underflow at t = {t:e} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("mismatched dimensionless parameters: {0}")]
    MismatchedInvariants(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const ACCEPTANCE: i32 = 4;
}

impl Error {
    /// Exit code reported when this error ends a command.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidParams(_)
            | Error::InvalidQuadrature(_)
            | Error::InvalidDistribution(_)
            | Error::MismatchedInvariants(_) => exit::CONFIG,
            Error::Io(_) | Error::Json(_) => exit::IO,
            _ => exit::NUMERICAL,
        }
    }
}
