//! Random targets and axis pairs for tests and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rotation::{cross, norm, Axis, Su2Element};

/// Haar-distributed element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Su2Element {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-6 {
            return Su2Element::raw(q[0] / r, q[1] / r, q[2] / r, q[3] / r);
        }
    }
}

/// Uniform point on the unit sphere.
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Axis {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if norm(&v) > 1e-6 {
            if let Ok(a) = Axis::normalize(v) {
                return a;
            }
        }
    }
}

/// Random pair of axes separated by exactly `delta`.
pub fn pair_with_gap<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> (Axis, Axis) {
    let m = random_axis(rng);
    let p = loop {
        let w = random_axis(rng);
        let c = cross(m.as_array(), w.as_array());
        if norm(&c) > 1e-3 {
            break Axis::normalize(c).expect("nonzero");
        }
    };
    let (mv, pv) = (m.as_array(), p.as_array());
    let n: [f64; 3] = std::array::from_fn(|i| delta.cos() * mv[i] + delta.sin() * pv[i]);
    (m, Axis::normalize(n).expect("unit combination"))
}
