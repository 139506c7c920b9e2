//! SU(2) elements as unit quaternions, the covering map onto SO(3), and
//! Euler factorizations about orthogonal frames.
//!
//! An element is stored as the real quadruple `(w, x, y, z)` of the matrix
//! `wI + i(xX + yY + zZ)`. With this convention the rotation about a unit
//! axis `v` by `theta` is `(cos(theta/2), -sin(theta/2) v)`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::DEFAULT_EPS;

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Reduces an angle modulo `4*pi` into `(-2*pi, 2*pi]`.
///
/// SU(2) rotations have period `4*pi`, so this never changes the element.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta - 4.0 * PI * ((theta - 2.0 * PI) / (4.0 * PI)).ceil();
    if r <= -2.0 * PI {
        r + 4.0 * PI
    } else if r > 2.0 * PI {
        r - 4.0 * PI
    } else {
        r
    }
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis(Vec3);

impl Axis {
    pub const X: Axis = Axis([1.0, 0.0, 0.0]);
    pub const Y: Axis = Axis([0.0, 1.0, 0.0]);
    pub const Z: Axis = Axis([0.0, 0.0, 1.0]);

    /// Accepts `v` if its norm is within the default tolerance of one.
    pub fn new(v: Vec3) -> Result<Self> {
        Self::with_tolerance(v, DEFAULT_EPS)
    }

    pub fn with_tolerance(v: Vec3, eps: f64) -> Result<Self> {
        let n = norm(&v);
        if !n.is_finite() || (n - 1.0).abs() > eps {
            return Err(Error::InvalidAxis { norm: n });
        }
        Ok(Axis(v))
    }

    /// Scales a nonzero vector onto the sphere.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidAxis { norm: n });
        }
        Ok(Axis([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn as_array(&self) -> &Vec3 {
        &self.0
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn cross(&self, other: &Axis) -> Vec3 {
        cross(&self.0, &other.0)
    }
}

impl Neg for Axis {
    type Output = Axis;
    fn neg(self) -> Axis {
        Axis([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v)
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.0
    }
}

/// Rotation about an axis by an angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub axis: Axis,
    pub theta: f64,
}

/// Unit quaternion `(w, x, y, z)` standing for `wI + i(xX + yY + zZ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Element {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Su2Element {
    pub const IDENTITY: Su2Element = Su2Element {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Accepts the quadruple if it has unit norm within the default
    /// tolerance.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        Self::with_tolerance([w, x, y, z], DEFAULT_EPS)
    }

    pub fn with_tolerance(q: [f64; 4], eps: f64) -> Result<Self> {
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > eps {
            return Err(Error::NonUnitQuaternion { norm: n });
        }
        Ok(Su2Element {
            w: q[0],
            x: q[1],
            y: q[2],
            z: q[3],
        })
    }

    /// Builds an element without checking the norm.
    pub(crate) const fn raw(w: f64, x: f64, y: f64, z: f64) -> Self {
        Su2Element { w, x, y, z }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn negate(&self) -> Self {
        Su2Element::raw(-self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean distance between the quadruples. Sign-sensitive: `u` and
    /// `-u` are at distance 2.
    pub fn distance(&self, other: &Su2Element) -> f64 {
        let d = [
            self.w - other.w,
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
        ];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt()
    }

    /// Distance up to the kernel `{I, -I}` of the map onto SO(3).
    pub fn distance_up_to_sign(&self, other: &Su2Element) -> f64 {
        self.distance(other).min(self.distance(&other.negate()))
    }

    /// Axis-angle form with `theta` in `[0, 2*pi]`. The identity reports the
    /// z axis.
    pub fn to_axis_angle(&self) -> AxisAngle {
        let s = norm(&self.vector());
        let theta = 2.0 * s.atan2(self.w);
        if s == 0.0 {
            return AxisAngle {
                axis: Axis::Z,
                theta,
            };
        }
        AxisAngle {
            axis: Axis([-self.x / s, -self.y / s, -self.z / s]),
            theta,
        }
    }
}

impl Default for Su2Element {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for Su2Element {
    type Output = Su2Element;
    fn mul(self, rhs: Su2Element) -> Su2Element {
        compose(&self, &rhs)
    }
}

impl fmt::Display for Su2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}

/// `R_v(theta) = cos(theta/2) I - i sin(theta/2) (v . sigma)`.
pub fn rot(axis: &Axis, theta: f64) -> Su2Element {
    let (s, c) = (0.5 * theta).sin_cos();
    let v = axis.as_array();
    Su2Element::raw(c, -v[0] * s, -v[1] * s, -v[2] * s)
}

/// Product `a * b` of the matrices represented by `a` and `b`.
pub fn compose(a: &Su2Element, b: &Su2Element) -> Su2Element {
    // (a0 + i a.s)(b0 + i b.s) = a0 b0 - a.b + i (a0 b + b0 a - a x b).s
    let av = a.vector();
    let bv = b.vector();
    let c = cross(&av, &bv);
    let out = Su2Element::raw(
        a.w * b.w - dot(&av, &bv),
        a.w * bv[0] + b.w * av[0] - c[0],
        a.w * bv[1] + b.w * av[1] - c[1],
        a.w * bv[2] + b.w * av[2] - c[2],
    );
    let n = out.norm();
    if (n - 1.0).abs() > 0.5 * DEFAULT_EPS {
        Su2Element::raw(out.w / n, out.x / n, out.y / n, out.z / n)
    } else {
        out
    }
}

/// Hermitian conjugate.
pub fn inverse(u: &Su2Element) -> Su2Element {
    Su2Element::raw(u.w, -u.x, -u.y, -u.z)
}

/// Product of a left-to-right list of elements.
pub fn product<'a, I>(items: I) -> Su2Element
where
    I: IntoIterator<Item = &'a Su2Element>,
{
    items
        .into_iter()
        .fold(Su2Element::IDENTITY, |acc, e| compose(&acc, e))
}

/// A 3x3 rotation matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Matrix(pub [[f64; 3]; 3]);

impl So3Matrix {
    pub const IDENTITY: So3Matrix =
        So3Matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Accepts a matrix that is orthogonal with unit determinant within `eps`.
    pub fn new(m: [[f64; 3]; 3], eps: f64) -> Result<Self> {
        let d = So3Matrix(m);
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRotation("non-finite entry".into()));
        }
        let mtm = d.transpose().mul_mat(&d);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (mtm.0[i][j] - want).abs() > eps {
                    return Err(Error::InvalidRotation(format!(
                        "M^T M differs from I at ({i},{j}) by {}",
                        (mtm.0[i][j] - want).abs()
                    )));
                }
            }
        }
        let det = d.determinant();
        if (det - 1.0).abs() > eps {
            return Err(Error::InvalidRotation(format!("determinant {det}")));
        }
        Ok(d)
    }

    pub fn from_row_major(v: [f64; 9], eps: f64) -> Result<Self> {
        Self::new([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]], eps)
    }

    pub fn transpose(&self) -> So3Matrix {
        let m = &self.0;
        So3Matrix([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul_mat(&self, other: &So3Matrix) -> So3Matrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        So3Matrix(out)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &So3Matrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }
}

/// The covering map `F`: `u (r . sigma) u^dagger = (F(u) r) . sigma`.
pub fn to_so3(u: &Su2Element) -> So3Matrix {
    // Hamilton quaternion of the same rotation is (w, -x, -y, -z).
    let (a, b, c, d) = (u.w, -u.x, -u.y, -u.z);
    So3Matrix([
        [
            1.0 - 2.0 * (c * c + d * d),
            2.0 * (b * c - a * d),
            2.0 * (b * d + a * c),
        ],
        [
            2.0 * (b * c + a * d),
            1.0 - 2.0 * (b * b + d * d),
            2.0 * (c * d - a * b),
        ],
        [
            2.0 * (b * d - a * c),
            2.0 * (c * d + a * b),
            1.0 - 2.0 * (b * b + c * c),
        ],
    ])
}

/// Fixes the sign of a lift: `w > 0`, or for `|w| <= eps` the first
/// component of `(x, y, z)` exceeding `eps` in magnitude is positive.
pub fn canonical_lift(u: &Su2Element, eps: f64) -> Su2Element {
    if u.w > eps {
        return *u;
    }
    if u.w < -eps {
        return u.negate();
    }
    for c in [u.x, u.y, u.z] {
        if c > eps {
            return *u;
        }
        if c < -eps {
            return u.negate();
        }
    }
    *u
}

/// One of the two preimages of `d` under [`to_so3`], in canonical sign.
pub fn from_so3(d: &So3Matrix) -> Result<Su2Element> {
    from_so3_with_tolerance(d, DEFAULT_EPS)
}

pub fn from_so3_with_tolerance(d: &So3Matrix, eps: f64) -> Result<Su2Element> {
    let d = So3Matrix::new(d.0, eps)?;
    let m = &d.0;
    let trace = m[0][0] + m[1][1] + m[2][2];
    // Shepperd: pivot on the largest of the four squared components.
    let (a, b, c, e) = if trace > m[0][0] && trace > m[1][1] && trace > m[2][2] {
        let s = 2.0 * (1.0 + trace).sqrt();
        (
            0.25 * s,
            (m[2][1] - m[1][2]) / s,
            (m[0][2] - m[2][0]) / s,
            (m[1][0] - m[0][1]) / s,
        )
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = 2.0 * (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt();
        (
            (m[2][1] - m[1][2]) / s,
            0.25 * s,
            (m[0][1] + m[1][0]) / s,
            (m[0][2] + m[2][0]) / s,
        )
    } else if m[1][1] > m[2][2] {
        let s = 2.0 * (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt();
        (
            (m[0][2] - m[2][0]) / s,
            (m[0][1] + m[1][0]) / s,
            0.25 * s,
            (m[1][2] + m[2][1]) / s,
        )
    } else {
        let s = 2.0 * (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt();
        (
            (m[1][0] - m[0][1]) / s,
            (m[0][2] + m[2][0]) / s,
            (m[1][2] + m[2][1]) / s,
            0.25 * s,
        )
    };
    let n = (a * a + b * b + c * c + e * e).sqrt();
    let u = Su2Element::raw(a / n, -b / n, -c / n, -e / n);
    Ok(canonical_lift(&u, eps))
}

/// Angles of `R_m(alpha) R_l(beta) R_m(gamma)`; `beta` lies in `[0, pi]`
/// when produced by a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// ZYZ factorization `u = R_z(alpha) R_y(beta) R_z(gamma)`, exact in SU(2).
pub fn euler_zyz(u: &Su2Element) -> EulerTriple {
    euler_zyz_with_tolerance(u, DEFAULT_EPS)
}

/// As [`euler_zyz`]. On the degenerate sets `sin(beta/2) <= eps` and
/// `cos(beta/2) <= eps`, `alpha` is pinned to zero.
pub fn euler_zyz_with_tolerance(u: &Su2Element, eps: f64) -> EulerTriple {
    // w = cos(b/2) cos(eta), z = -cos(b/2) sin(eta),
    // x = -sin(b/2) sin(zeta), y = -sin(b/2) cos(zeta),
    // with eta = (gamma + alpha)/2 and zeta = (gamma - alpha)/2.
    let cb = u.w.hypot(u.z);
    let sb = u.x.hypot(u.y);
    let beta = 2.0 * sb.atan2(cb);
    let eta = (-u.z).atan2(u.w);
    let zeta = (-u.x).atan2(-u.y);
    let (alpha, gamma) = if sb <= eps {
        (0.0, 2.0 * eta)
    } else if cb <= eps {
        (0.0, 2.0 * zeta)
    } else {
        (eta - zeta, eta + zeta)
    };
    EulerTriple {
        alpha: reduce_angle(alpha),
        beta,
        gamma: reduce_angle(gamma),
    }
}

/// Orthogonal pair `(l, m)` with an element `u` carrying `e_y` to `l` and
/// `e_z` to `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub l: Axis,
    pub m: Axis,
    pub u: Su2Element,
}

pub fn frame_for(l: &Axis, m: &Axis) -> Result<Frame> {
    frame_for_with_tolerance(l, m, DEFAULT_EPS)
}

pub fn frame_for_with_tolerance(l: &Axis, m: &Axis, eps: f64) -> Result<Frame> {
    let d = l.dot(m);
    if d.abs() > eps {
        return Err(Error::InvalidFrame { dot: d });
    }
    let mv = m.as_array();
    let lv = l.as_array();
    // Spherical coordinates of m fix the first two angles; the third turns
    // e_y onto l.
    let alpha = mv[1].atan2(mv[0]);
    let beta = mv[0].hypot(mv[1]).atan2(mv[2]);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let row1 = [cb * ca, cb * sa, -sb];
    let row2 = [-sa, ca, 0.0];
    let gamma = (-dot(&row1, lv)).atan2(dot(&row2, lv));
    let u = compose(
        &compose(&rot(&Axis::Z, alpha), &rot(&Axis::Y, beta)),
        &rot(&Axis::Z, gamma),
    );
    Ok(Frame { l: *l, m: *m, u })
}

/// Factorization `v = R_m(alpha) R_l(beta) R_m(gamma)` about a frame,
/// obtained from the ZYZ angles of `u^dagger v u`.
pub fn generalized_euler(v: &Su2Element, frame: &Frame) -> EulerTriple {
    generalized_euler_with_tolerance(v, frame, DEFAULT_EPS)
}

pub fn generalized_euler_with_tolerance(v: &Su2Element, frame: &Frame, eps: f64) -> EulerTriple {
    let local = compose(&inverse(&frame.u), &compose(v, &frame.u));
    euler_zyz_with_tolerance(&local, eps)
}

/// Rebuilds `R_m(alpha) R_l(beta) R_m(gamma)`.
pub fn from_generalized_euler(t: &EulerTriple, frame: &Frame) -> Su2Element {
    compose(
        &compose(&rot(&frame.m, t.alpha), &rot(&frame.l, t.beta)),
        &rot(&frame.m, t.gamma),
    )
}

/// Great-circle distance on the unit sphere.
pub fn geodesic(a: &Axis, b: &Axis) -> f64 {
    geodesic_vec(a.as_array(), b.as_array())
}

pub(crate) fn geodesic_vec(a: &Vec3, b: &Vec3) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}
