use thiserror::Error;

/// Errors raised when an input falls outside the admissible domain of an
/// operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis is not a unit vector (norm {norm})")]
    InvalidAxis { norm: f64 },

    #[error("quaternion is not unit length (norm {norm})")]
    NonUnitQuaternion { norm: f64 },

    #[error("matrix is not a proper rotation: {0}")]
    InvalidRotation(String),

    #[error("frame axes are not orthogonal (dot {dot})")]
    InvalidFrame { dot: f64 },

    #[error("rotation axes are (anti)parallel (|m.n| = {dot})")]
    AxesParallel { dot: f64 },

    #[error("slab angle {beta} outside [0, 2*delta] for delta {delta}")]
    InvalidSlab { beta: f64, delta: f64 },

    #[error("slab angle {beta} exceeds 2*delta for delta {delta}")]
    InfeasibleSlab { beta: f64, delta: f64 },

    #[error("factor pattern error: {0}")]
    Pattern(String),
}

pub type Result<T> = std::result::Result<T, Error>;
