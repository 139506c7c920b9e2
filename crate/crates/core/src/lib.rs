//! Shortest products of rotations about two fixed axes.
//!
//! Given unit axes `m`, `n` and a target rotation, [`count_min`] gives the
//! least number of alternating factors needed, and [`decompose_min`] returns
//! an explicit product of that length.

pub mod counting;
pub mod io;
pub mod error;
pub mod oracle;
pub mod rotation;
pub mod sampling;
pub mod synthesis;
pub mod tolerance;

pub use counting::{count_min, lowenthal_bound, AxisPair, CountReport, Parity};
pub use error::{Error, Result};
pub use rotation::{compose, rot, Axis, EulerTriple, So3Matrix, Su2Element};
pub use synthesis::{decompose_min, verify_decomposition, AxisLabel, Decomposition, Factor};
pub use tolerance::Tolerances;
