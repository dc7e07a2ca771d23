use thiserror::Error;

/// Failure modes shared by every solver stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge on [{a}, {b}]: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("pole at {tau} is not interior to [{a}, {b}]")]
    PoleOutsideDomain { tau: f64, a: f64, b: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("k-grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("phase jump of {jump:.3} rad between tau = {tau_left} and tau = {tau_right}")]
    BranchJump {
        tau_left: f64,
        tau_right: f64,
        jump: f64,
    },

    #[error("series factor C(q, alpha) = {0:e} is too small to invert")]
    DegenerateSeries(f64),

    #[error("number density is neither given nor derivable (supply it or the particle spin)")]
    MissingDensity,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
