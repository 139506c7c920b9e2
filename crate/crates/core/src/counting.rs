//! Closed-form minimal factor counts for rotations about two fixed axes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::{
    compose, frame_for_with_tolerance, generalized_euler_with_tolerance, rot, Axis, EulerTriple,
    Frame, Su2Element,
};
use crate::tolerance::{Tolerances, DEFAULT_EPS};

/// Ceiling that snaps to the nearest integer when `x` lies within `eps` of
/// it, so rounding noise at exact boundaries does not add a factor.
pub fn ceil_snapped_with(x: f64, eps: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= eps {
        r as i64
    } else {
        x.ceil() as i64
    }
}

pub fn ceil_snapped(x: f64) -> i64 {
    ceil_snapped_with(x, DEFAULT_EPS)
}

/// `b(v, u) = |(x, y, z) . v|`.
pub fn overlap_b(v: &Axis, u: &Su2Element) -> f64 {
    let a = v.as_array();
    (u.x * a[0] + u.y * a[1] + u.z * a[2]).abs()
}

/// The auxiliary angle `f(alpha, beta, delta)`: the middle Euler angle of
/// `R_l(-delta) R_m(alpha) R_l(beta)` about the frame `(l, m)`.
pub fn f_angle(alpha: f64, beta: f64, delta: f64) -> f64 {
    let (sb, cb) = (0.5 * beta).sin_cos();
    let (sd, cd) = (0.5 * delta).sin_cos();
    let s = cb * cb * cd * cd + sb * sb * sd * sd + 2.0 * alpha.cos() * sb * sd * cb * cd;
    2.0 * s.clamp(0.0, 1.0).sqrt().acos()
}

/// Minimal even count `g(alpha, beta, delta)`.
pub fn g_count(alpha: f64, beta: f64, delta: f64) -> u32 {
    g_count_with(alpha, beta, delta, &Tolerances::default())
}

pub fn g_count_with(alpha: f64, beta: f64, delta: f64, tol: &Tolerances) -> u32 {
    g_from_beta_prime(f_angle(alpha, beta, delta), delta, tol)
}

/// Even count as a function of the auxiliary angle itself.
pub fn g_from_beta_prime(beta_prime: f64, delta: f64, tol: &Tolerances) -> u32 {
    if beta_prime >= delta - tol.angle {
        2 * ceil_snapped_with(beta_prime / (2.0 * delta) + 0.5, tol.ceil) as u32
    } else {
        4
    }
}

/// Minimal odd count `2 ceil(beta / 2 delta) + 1`.
pub fn m_odd_count(beta: f64, delta: f64) -> u32 {
    m_odd_count_with(beta, delta, &Tolerances::default())
}

pub fn m_odd_count_with(beta: f64, delta: f64, tol: &Tolerances) -> u32 {
    2 * ceil_snapped_with(beta / (2.0 * delta), tol.ceil).max(0) as u32 + 1
}

/// Two rotation axes with signs and orientation resolved.
///
/// `m` is negated when the raw axes meet at an obtuse angle, so that
/// `delta = arccos(m.n)` lies in `(0, pi/2]`. `l` is the unit normal
/// `m x n / |m x n|`, and `frame` realizes the orthogonal pair `(l, m)`.
/// When `swapped` is set, `m` and `n` hold the caller's second and first
/// axes respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPair {
    pub m: Axis,
    pub n: Axis,
    pub delta: f64,
    pub l: Axis,
    pub m_flipped: bool,
    pub swapped: bool,
    pub frame: Frame,
    pub tol: Tolerances,
}

impl AxisPair {
    pub fn new(m_raw: &Axis, n_raw: &Axis) -> Result<Self> {
        Self::with_tolerances(m_raw, n_raw, Tolerances::default())
    }

    pub fn with_tolerances(m_raw: &Axis, n_raw: &Axis, tol: Tolerances) -> Result<Self> {
        let m_raw = Axis::with_tolerance(*m_raw.as_array(), tol.norm)?;
        let n_raw = Axis::with_tolerance(*n_raw.as_array(), tol.norm)?;
        let raw_dot = m_raw.dot(&n_raw);
        if raw_dot.abs() >= 1.0 - tol.parallel {
            return Err(Error::AxesParallel { dot: raw_dot.abs() });
        }
        let (m, m_flipped) = if raw_dot < 0.0 {
            (-m_raw, true)
        } else {
            (m_raw, false)
        };
        Self::oriented(m, n_raw, m_flipped, false, tol)
    }

    fn oriented(m: Axis, n: Axis, m_flipped: bool, swapped: bool, tol: Tolerances) -> Result<Self> {
        let delta = m.dot(&n).clamp(-1.0, 1.0).acos();
        let l = Axis::normalize(m.cross(&n))?;
        let frame = frame_for_with_tolerance(&l, &m, tol.orth.max(1e-12))?;
        Ok(AxisPair {
            m,
            n,
            delta,
            l,
            m_flipped,
            swapped,
            frame,
            tol,
        })
    }

    /// The same pair with the roles of the axes exchanged; `l` changes sign.
    pub fn swapped(&self) -> Self {
        Self::oriented(self.n, self.m, self.m_flipped, !self.swapped, self.tol)
            .expect("exchanging a valid pair keeps it valid")
    }

    /// Generalized Euler angles of `u` about `(l, m)`.
    pub fn euler(&self, u: &Su2Element) -> EulerTriple {
        generalized_euler_with_tolerance(u, &self.frame, self.tol.angle)
    }
}

/// Which of the three constructions attains the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `m ... m`, odd length.
    #[serde(rename = "odd")]
    Odd,
    /// Leftmost factor about `n`, rightmost about `m`.
    #[serde(rename = "even-mn")]
    EvenMn,
    /// Leftmost factor about `m`, rightmost about `n`.
    #[serde(rename = "even-nm")]
    EvenNm,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::EvenMn => "even-mn",
            Parity::EvenNm => "even-nm",
        }
    }
}

/// Minimal count of a target together with the per-parity minima. All
/// angles and parities refer to the governing pair `pair`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountReport {
    pub n_min: u32,
    pub m_odd: u32,
    pub m_even_mn: u32,
    pub m_even_nm: u32,
    pub euler: EulerTriple,
    pub beta: f64,
    pub beta_prime: f64,
    pub lowenthal: u32,
    pub chosen_parity: Parity,
    pub pair: AxisPair,
}

/// `beta'` of `R_l(-delta) u` about `(l, m)`.
pub fn beta_prime_of(u: &Su2Element, pair: &AxisPair) -> f64 {
    let shifted = compose(&rot(&pair.l, -pair.delta), u);
    pair.euler(&shifted).beta
}

/// Minimal number of rotations about `m_raw` or `n_raw` whose product is `u`.
pub fn count_min(u: &Su2Element, m_raw: &Axis, n_raw: &Axis) -> Result<CountReport> {
    let pair = AxisPair::new(m_raw, n_raw)?;
    Ok(count_in_pair(u, &pair))
}

/// As [`count_min`] for an already normalized pair. The axis with the
/// larger overlap governs; ties keep the given order.
pub fn count_in_pair(u: &Su2Element, pair: &AxisPair) -> CountReport {
    let governing = if overlap_b(&pair.m, u) < overlap_b(&pair.n, u) {
        pair.swapped()
    } else {
        *pair
    };
    let tol = &governing.tol;
    let delta = governing.delta;
    let e = governing.euler(u);
    let m_odd = m_odd_count_with(e.beta, delta, tol);
    let beta_prime = f_angle(e.alpha, e.beta, delta);
    let m_even_mn = g_from_beta_prime(beta_prime, delta, tol);
    let m_even_nm = g_count_with(e.gamma, -e.beta, delta, tol);
    let (n_min, chosen_parity) = [
        (m_odd, Parity::Odd),
        (m_even_mn, Parity::EvenMn),
        (m_even_nm, Parity::EvenNm),
    ]
    .into_iter()
    .fold((u32::MAX, Parity::Odd), |best, c| {
        if c.0 < best.0 {
            c
        } else {
            best
        }
    });
    CountReport {
        n_min,
        m_odd,
        m_even_mn,
        m_even_nm,
        euler: e,
        beta: e.beta,
        beta_prime,
        lowenthal: lowenthal_for_delta(delta, tol),
        chosen_parity,
        pair: governing,
    }
}

/// Worst case of the minimal count over all targets, `ceil(pi / delta) + 1`.
pub fn lowenthal_bound(m: &Axis, n: &Axis) -> Result<u32> {
    let pair = AxisPair::new(m, n)?;
    Ok(lowenthal_for_delta(pair.delta, &pair.tol))
}

pub fn lowenthal_for_delta(delta: f64, tol: &Tolerances) -> u32 {
    ceil_snapped_with(PI / delta, tol.ceil) as u32 + 1
}

/// A target whose minimal count equals the worst case:
/// `R_m(pi) R_l(pi - delta)` when `ceil(pi/delta)` is even, else `R_l(pi)`.
pub fn worst_case_witness(pair: &AxisPair) -> Su2Element {
    let nu = ceil_snapped_with(PI / pair.delta, pair.tol.ceil);
    if nu % 2 == 0 {
        compose(&rot(&pair.m, PI), &rot(&pair.l, PI - pair.delta))
    } else {
        rot(&pair.l, PI)
    }
}
