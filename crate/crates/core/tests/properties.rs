//! Invariants checked against an independent 2x2 complex matrix model of
//! SU(2).

use biaxial::counting::{count_min, f_angle, g_count, lowenthal_for_delta, m_odd_count};
use biaxial::io::{cmd_decompose, Certificate, ProblemInstance, RunOptions, Target};
use biaxial::oracle::bounds_of_decomposition;
use biaxial::rotation::{
    canonical_lift, euler_zyz, from_so3, frame_for, from_generalized_euler, generalized_euler,
    geodesic, inverse, to_so3,
};
use biaxial::synthesis::alternates;
use biaxial::{compose, decompose_min, rot, Axis, Su2Element, Tolerances};
use num_complex::Complex64 as C;
use proptest::prelude::*;

type M2 = [[C; 2]; 2];

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn pauli() -> [M2; 3] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    [[[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
}

fn mat(u: &Su2Element) -> M2 {
    let s = pauli();
    let mut m = [[c(u.w, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(u.w, 0.0)]];
    for (k, coef) in [u.x, u.y, u.z].into_iter().enumerate() {
        for r in 0..2 {
            for q in 0..2 {
                m[r][q] += c(0.0, coef) * s[k][r][q];
            }
        }
    }
    m
}

fn mul(a: &M2, b: &M2) -> M2 {
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for q in 0..2 {
            m[r][q] = a[r][0] * b[0][q] + a[r][1] * b[1][q];
        }
    }
    m
}

fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn diff(a: &M2, b: &M2) -> f64 {
    let mut d: f64 = 0.0;
    for r in 0..2 {
        for q in 0..2 {
            d = d.max((a[r][q] - b[r][q]).norm());
        }
    }
    d
}

/// `exp(-i theta/2 v.sigma)` by its closed form.
fn rot_mat(v: &[f64; 3], theta: f64) -> M2 {
    let s = pauli();
    let (sn, cs) = (0.5 * theta).sin_cos();
    let mut m = [[c(cs, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(cs, 0.0)]];
    for k in 0..3 {
        for r in 0..2 {
            for q in 0..2 {
                m[r][q] += c(0.0, -sn * v[k]) * s[k][r][q];
            }
        }
    }
    m
}

/// `D_ij = tr(sigma_i U sigma_j U^dagger) / 2`.
fn so3_of(u: &M2) -> [[f64; 3]; 3] {
    let s = pauli();
    let ud = dagger(u);
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let p = mul(&s[i], &mul(u, &mul(&s[j], &ud)));
            d[i][j] = 0.5 * (p[0][0] + p[1][1]).re;
        }
    }
    d
}

fn su2() -> impl Strategy<Value = Su2Element> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("nonzero", |q| q.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|q| {
            let r = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            Su2Element::new(q[0] / r, q[1] / r, q[2] / r, q[3] / r).unwrap()
        })
}

fn axis() -> impl Strategy<Value = Axis> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| Axis::normalize(v).unwrap())
}

fn axis_pair() -> impl Strategy<Value = (Axis, Axis)> {
    (axis(), axis()).prop_filter("not parallel", |(m, n)| m.dot(n).abs() < 0.995)
}

fn angle() -> impl Strategy<Value = f64> {
    -12.0f64..12.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compose_matches_matrix_product(a in su2(), b in su2()) {
        let p = mat(&compose(&a, &b));
        prop_assert!(diff(&p, &mul(&mat(&a), &mat(&b))) < 1e-13);
    }

    #[test]
    fn rot_matches_exponential(v in axis(), t in angle()) {
        prop_assert!(diff(&mat(&rot(&v, t)), &rot_mat(v.as_array(), t)) < 1e-13);
    }

    #[test]
    fn covering_map_matches_adjoint_action(u in su2()) {
        let want = so3_of(&mat(&u));
        let got = to_so3(&u).to_row_major();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((got[3 * i + j] - want[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn covering_map_is_multiplicative_with_kernel(a in su2(), b in su2()) {
        let lhs = to_so3(&compose(&a, &b));
        let rhs = to_so3(&a).mul_mat(&to_so3(&b));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(to_so3(&a.negate()).max_abs_diff(&to_so3(&a)) < 1e-15);
    }

    #[test]
    fn so3_round_trip_up_to_sign(u in su2()) {
        let back = from_so3(&to_so3(&u)).unwrap();
        prop_assert!(back.distance_up_to_sign(&u) < 1e-12);
        let lifted = canonical_lift(&u, 1e-9);
        prop_assert!(lifted.distance_up_to_sign(&u) < 1e-15);
        prop_assert!(canonical_lift(&u.negate(), 1e-9).distance(&lifted) < 1e-15);
    }

    #[test]
    fn same_axis_angles_add(v in axis(), a in angle(), b in angle()) {
        let lhs = compose(&rot(&v, a), &rot(&v, b));
        prop_assert!(lhs.distance(&rot(&v, a + b)) < 1e-13);
    }

    #[test]
    fn conjugation_moves_the_axis(u in su2(), v in axis(), t in angle()) {
        let lhs = compose(&u, &compose(&rot(&v, t), &inverse(&u)));
        let w = Axis::normalize(to_so3(&u).apply(v.as_array())).unwrap();
        prop_assert!(lhs.distance(&rot(&w, t)) < 1e-12);
    }

    #[test]
    fn geodesic_triangle_inequality(a in axis(), b in axis(), d in axis()) {
        prop_assert!(geodesic(&a, &d) <= geodesic(&a, &b) + geodesic(&b, &d) + 1e-12);
        prop_assert!((geodesic(&a, &b) - geodesic(&b, &a)).abs() < 1e-15);
    }

    #[test]
    fn euler_zyz_reconstructs(u in su2()) {
        let e = euler_zyz(&u);
        let back = compose(&compose(&rot(&Axis::Z, e.alpha), &rot(&Axis::Y, e.beta)), &rot(&Axis::Z, e.gamma));
        prop_assert!(back.distance(&u) < 1e-12);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-15).contains(&e.beta));
    }

    #[test]
    fn generalized_euler_reconstructs(u in su2(), (m, n) in axis_pair()) {
        let l = Axis::normalize(m.cross(&n)).unwrap();
        let f = frame_for(&l, &m).unwrap();
        let e = generalized_euler(&u, &f);
        prop_assert!(from_generalized_euler(&e, &f).distance(&u) < 1e-12);
    }

    #[test]
    fn decomposition_is_valid_and_minimal_by_formula(u in su2(), (m, n) in axis_pair()) {
        let r = count_min(&u, &m, &n).unwrap();
        let d = decompose_min(&u, &m, &n).unwrap();
        prop_assert!(d.residual <= 1e-9, "residual {}", d.residual);
        prop_assert!(alternates(&d.factors));
        prop_assert_eq!(d.count as u32, r.n_min);
        prop_assert!(r.n_min <= r.lowenthal);
        prop_assert_eq!(r.n_min, r.m_odd.min(r.m_even_mn).min(r.m_even_nm));
        prop_assert_eq!(r.n_min % 2 == 1, r.chosen_parity == biaxial::Parity::Odd);
        prop_assert!(bounds_of_decomposition(&d).unwrap().all_hold());
    }

    #[test]
    fn explicit_products_bound_the_count(
        (m, n) in axis_pair(),
        angles in prop::collection::vec(angle(), 1..7),
        start_m in any::<bool>(),
    ) {
        let mut u = Su2Element::IDENTITY;
        for (i, a) in angles.iter().enumerate() {
            let v = if (i % 2 == 0) == start_m { &m } else { &n };
            u = compose(&u, &rot(v, *a));
        }
        let r = count_min(&u, &m, &n).unwrap();
        prop_assert!(r.n_min as usize <= angles.len(), "{} > {}", r.n_min, angles.len());
        let d = decompose_min(&u, &m, &n).unwrap();
        prop_assert!(d.residual <= 1e-9, "residual {}", d.residual);
        prop_assert_eq!(d.count as u32, r.n_min);
    }

    #[test]
    fn count_is_invariant_under_symmetries(u in su2(), (m, n) in axis_pair()) {
        let base = count_min(&u, &m, &n).unwrap().n_min;
        prop_assert_eq!(count_min(&u.negate(), &m, &n).unwrap().n_min, base);
        prop_assert_eq!(count_min(&u, &-m, &n).unwrap().n_min, base);
        prop_assert_eq!(count_min(&u, &m, &-n).unwrap().n_min, base);
        prop_assert_eq!(count_min(&u, &n, &m).unwrap().n_min, base);
        prop_assert_eq!(count_min(&inverse(&u), &m, &n).unwrap().n_min, base);
    }

    #[test]
    fn counts_are_monotone(b1 in 0.0f64..std::f64::consts::PI, b2 in 0.0f64..std::f64::consts::PI,
                           a in angle(), d1 in 0.05f64..std::f64::consts::FRAC_PI_2, d2 in 0.05f64..std::f64::consts::FRAC_PI_2) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let (dl, dh) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(m_odd_count(lo, dl) <= m_odd_count(hi, dl));
        prop_assert!(m_odd_count(lo, dh) <= m_odd_count(lo, dl));
        let tol = Tolerances::default();
        prop_assert!(lowenthal_for_delta(dh, &tol) <= lowenthal_for_delta(dl, &tol));
        prop_assert_eq!(m_odd_count(lo, dl) % 2, 1);
        prop_assert_eq!(g_count(a, lo, dl) % 2, 0);
        let f = f_angle(a, lo, dl);
        prop_assert!(f >= (lo - dl).abs() - 1e-12 && f <= lo + dl + 1e-12);
    }

    #[test]
    fn certificate_json_round_trip(u in su2(), (m, n) in axis_pair()) {
        let inst = ProblemInstance { m: *m.as_array(), n: *n.as_array(), target: Target::Su2(u.to_array()) };
        let c = cmd_decompose(&inst, &RunOptions::default()).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }
}
