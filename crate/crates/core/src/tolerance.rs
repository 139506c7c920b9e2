//! Admission tolerances.
//!
//! The identities implemented by this crate are exact; these thresholds only
//! decide when a floating-point input is accepted as satisfying a
//! precondition (unit length, orthogonality) and when a computed quantity is
//! considered to sit on a boundary (a degenerate Euler angle, an integer
//! ratio inside a ceiling).

/// Tolerance set threaded through the axis pair into counting and synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unit-norm admission for axes and quaternions; orthogonality of
    /// rotation matrices.
    pub norm: f64,
    /// Orthogonality of frame axes.
    pub orth: f64,
    /// Degenerate Euler angles and the `f >= delta` branch.
    pub angle: f64,
    /// Rejection of near-parallel axis pairs on `|m.n|`.
    pub parallel: f64,
    /// Snapping radius of [`crate::counting::ceil_snapped`].
    pub ceil: f64,
    /// Maximum reconstruction residual of an emitted decomposition.
    pub recon: f64,
}

pub const DEFAULT_EPS: f64 = 1e-9;

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: DEFAULT_EPS,
            orth: DEFAULT_EPS,
            angle: DEFAULT_EPS,
            parallel: DEFAULT_EPS,
            ceil: DEFAULT_EPS,
            recon: DEFAULT_EPS,
        }
    }
}

impl Tolerances {
    /// Sets every admission tolerance to `eps`. The reconstruction bound is
    /// left at its default.
    pub fn uniform(eps: f64) -> Self {
        Self {
            norm: eps,
            orth: eps,
            angle: eps,
            parallel: eps,
            ceil: eps,
            ..Self::default()
        }
    }
}
