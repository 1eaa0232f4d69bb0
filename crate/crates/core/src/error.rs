use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point {0} is not in the upper half-plane")]
    NotInUpperHalfPlane(C64),

    #[error("drivers {left} and {right} collided at t = {time} (gap {gap:e})")]
    Collision {
        time: f64,
        left: usize,
        right: usize,
        gap: f64,
    },

    #[error("drivers {left} and {right} would cross at t = {time} after exhausting step halvings")]
    OrderViolation { time: f64, left: usize, right: usize },

    #[error("pole {index} left the upper half-plane at t = {time}")]
    PoleEscaped { time: f64, index: usize },

    #[error("reverse flow left the upper half-plane at s = {time}; increase the lift")]
    ReverseFlowEscaped { time: f64 },

    #[error("Newton inversion did not converge at z = {z}; move z higher in the cone (larger beta)")]
    NewtonDiverged { z: C64 },

    #[error("not a Dyck path: {0}")]
    NotDyck(String),

    #[error("invalid configuration pairing: {0}")]
    InvalidPairing(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("points must be pairwise distinct")]
    CoincidentPoints,

    #[error("all configuration weights are zero")]
    ZeroWeights,
}

impl Error {
    /// True for failures of the numerical integration itself.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Collision { .. }
                | Error::OrderViolation { .. }
                | Error::PoleEscaped { .. }
                | Error::ReverseFlowEscaped { .. }
                | Error::NewtonDiverged { .. }
        )
    }
}
