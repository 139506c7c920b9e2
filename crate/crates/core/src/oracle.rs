//! Independent checks of the closed-form counts: geodesic lower bounds on
//! the SO(3) image of a factor product, and a multistart derivative-free
//! search over alternating factor patterns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{AxisPair, CountReport};
use crate::error::{Error, Result};
use crate::rotation::{compose, geodesic_vec, rot, to_so3, Axis, Su2Element};
use crate::synthesis::{
    alternates, decompose_in_pair, AxisLabel, Decomposition, Factor, SynthesisOptions,
};

/// Slack added to every geodesic bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// A search reaching below this residual counts as a feasible pattern.
pub const FEASIBLE_RESIDUAL: f64 = 1e-6;
/// A search staying above this residual counts as an infeasible pattern.
pub const INFEASIBLE_RESIDUAL: f64 = 1e-4;
/// Reconstruction bound for the explicit optimal decomposition.
pub const RECON_RESIDUAL: f64 = 1e-9;

/// Geodesic bounds for a product of alternating rotations. `a` is the axis
/// of the first-applied (rightmost) factor and `b` the other one. Bounds
/// that do not apply to the product's parity are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicBounds {
    pub length: usize,
    pub delta: f64,
    /// `d(Da, a)` and `d(Da, b)`.
    pub d_aa: f64,
    pub d_ab: f64,
    /// Odd length `2k - 1`: `d(Da, a) <= 2(k - 1) delta`.
    pub odd_aa: Option<bool>,
    /// Odd length `2k - 1`: `d(Da, b) <= (2k - 1) delta`.
    pub odd_ab: Option<bool>,
    /// Even length `2k`: `d(Da, b) <= (2k - 1) delta`.
    pub even_ab: Option<bool>,
    /// Even length `2k`: `d(Da, a) <= 2k delta`.
    pub even_aa: Option<bool>,
}

impl GeodesicBounds {
    pub fn all_hold(&self) -> bool {
        [self.odd_aa, self.odd_ab, self.even_ab, self.even_aa]
            .iter()
            .all(|b| b.unwrap_or(true))
    }
}

fn axis_of(pair: &AxisPair, label: AxisLabel) -> &Axis {
    match label {
        AxisLabel::M => &pair.m,
        AxisLabel::N => &pair.n,
    }
}

/// Evaluates the geodesic bounds for factors whose labels refer to
/// `pair.m` and `pair.n`.
pub fn geodesic_bounds(factors: &[Factor], pair: &AxisPair) -> Result<GeodesicBounds> {
    if factors.is_empty() {
        return Err(Error::Pattern("empty factor list".into()));
    }
    if !alternates(factors) {
        return Err(Error::Pattern("factors do not alternate".into()));
    }
    let u = factors.iter().fold(Su2Element::IDENTITY, |acc, f| {
        compose(&acc, &rot(axis_of(pair, f.axis), f.angle))
    });
    let d = to_so3(&u);
    let first = factors.last().expect("nonempty").axis;
    let a = axis_of(pair, first).as_array();
    let b = axis_of(pair, first.other()).as_array();
    let da = d.apply(a);
    let d_aa = geodesic_vec(&da, a);
    let d_ab = geodesic_vec(&da, b);
    let len = factors.len();
    let delta = pair.delta;
    let mut r = GeodesicBounds {
        length: len,
        delta,
        d_aa,
        d_ab,
        odd_aa: None,
        odd_ab: None,
        even_ab: None,
        even_aa: None,
    };
    if len % 2 == 1 {
        let k = len.div_ceil(2);
        r.odd_aa = Some(d_aa <= 2.0 * (k as f64 - 1.0) * delta + BOUND_SLACK);
        r.odd_ab = Some(d_ab <= (2.0 * k as f64 - 1.0) * delta + BOUND_SLACK);
    } else {
        let k = len / 2;
        r.even_ab = Some(d_ab <= (2.0 * k as f64 - 1.0) * delta + BOUND_SLACK);
        r.even_aa = Some(d_aa <= 2.0 * k as f64 * delta + BOUND_SLACK);
    }
    Ok(r)
}

/// Rewrites factors labelled against `axes` so that they refer to
/// `pair.m`/`pair.n`, negating angles where an axis appears with the
/// opposite sign.
pub fn relabel_to_pair(
    factors: &[Factor],
    axes: &(Axis, Axis),
    pair: &AxisPair,
) -> Result<Vec<Factor>> {
    let map = |v: &Axis| -> Result<(AxisLabel, f64)> {
        for (label, w) in [(AxisLabel::M, &pair.m), (AxisLabel::N, &pair.n)] {
            let c = v.dot(w);
            if (c - 1.0).abs() <= 1e-9 {
                return Ok((label, 1.0));
            }
            if (c + 1.0).abs() <= 1e-9 {
                return Ok((label, -1.0));
            }
        }
        Err(Error::Pattern("axis does not belong to the pair".into()))
    };
    let (lm, sm) = map(&axes.0)?;
    let (ln, sn) = map(&axes.1)?;
    Ok(factors
        .iter()
        .map(|f| match f.axis {
            AxisLabel::M => Factor::new(lm, sm * f.angle),
            AxisLabel::N => Factor::new(ln, sn * f.angle),
        })
        .collect())
}

/// [`geodesic_bounds`] on a decomposition's own factors.
pub fn bounds_of_decomposition(d: &Decomposition) -> Result<GeodesicBounds> {
    let f = relabel_to_pair(&d.factors, &d.axes, &d.pair)?;
    geodesic_bounds(&f, &d.pair)
}

/// Alternating pattern of `k` factors. `first_axis` is the axis of the
/// factor applied first, i.e. the rightmost one in the written product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub k: usize,
    pub first_axis: AxisLabel,
}

impl PatternSpec {
    pub fn new(k: usize, first_axis: AxisLabel) -> Self {
        Self { k, first_axis }
    }

    /// Axis label of each factor in written order.
    pub fn labels(&self) -> Vec<AxisLabel> {
        (0..self.k)
            .map(|i| {
                // distance from the right end
                if (self.k - 1 - i).is_multiple_of(2) {
                    self.first_axis
                } else {
                    self.first_axis.other()
                }
            })
            .collect()
    }

    pub fn factors(&self, angles: &[f64]) -> Vec<Factor> {
        self.labels()
            .into_iter()
            .zip(angles)
            .map(|(axis, &angle)| Factor { axis, angle })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Distance to the target up to sign.
    pub best_residual: f64,
    /// Angles of the best pattern product, in written order.
    pub best_angles: Vec<f64>,
    pub evaluations: u64,
    pub seed: u64,
}

/// Budget of the local refinement from each start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub max_evals_per_dim: usize,
    pub restarts: usize,
    /// Squared residual at which a start stops early.
    pub stop_below: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_evals_per_dim: 1500,
            restarts: 4,
            stop_below: 1e-28,
        }
    }
}

struct Objective<'a> {
    axes: Vec<&'a Axis>,
    target: &'a Su2Element,
}

impl Objective<'_> {
    fn product(&self, angles: &[f64]) -> Su2Element {
        self.axes
            .iter()
            .zip(angles)
            .fold(Su2Element::IDENTITY, |acc, (v, &a)| compose(&acc, &rot(v, a)))
    }

    /// Squared distance to the nearer of `target` and `-target`.
    fn eval(&self, angles: &[f64]) -> f64 {
        let p = self.product(angles);
        let t = self.target;
        let s = if p.w * t.w + p.x * t.x + p.y * t.y + p.z * t.z >= 0.0 {
            1.0
        } else {
            -1.0
        };
        let d = [p.w - s * t.w, p.x - s * t.x, p.y - s * t.y, p.z - s * t.z];
        d.iter().map(|v| v * v).sum()
    }
}

/// Nelder-Mead with dimension-adapted coefficients. Returns the best point,
/// its value and the number of evaluations spent.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    scale: f64,
    max_evals: usize,
    stop_below: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let (rho, sigma) = (0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scale;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();

    while evals < max_evals {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        if values[best] <= stop_below {
            break;
        }
        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size < 1e-15 || (spread <= 1e-32 && size < 1e-10) {
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < values[best] {
            let xe = along(alpha * gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let x = along(alpha * rho);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(-rho);
            let v = f(&x);
            (x, v)
        };
        evals += 1;
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let xb = simplex[best].clone();
        for &i in &order[1..] {
            for (p, b) in simplex[i].iter_mut().zip(&xb) {
                *p = b + sigma * (*p - b);
            }
            values[i] = f(&simplex[i]);
            evals += 1;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty simplex");
    (simplex[best].clone(), values[best], evals)
}

/// Multistart search for angles making the pattern product equal `u` up to
/// sign. Start `i` draws its initial point uniformly from `[-2pi, 2pi]^k`
/// using stream `i` of a generator seeded with `seed`, so runs with more
/// starts extend runs with fewer.
pub fn numeric_search(
    u: &Su2Element,
    pair: &AxisPair,
    pattern: PatternSpec,
    starts: usize,
    seed: u64,
) -> SearchResult {
    numeric_search_with(u, pair, pattern, starts, seed, &SearchOptions::default())
}

pub fn numeric_search_with(
    u: &Su2Element,
    pair: &AxisPair,
    pattern: PatternSpec,
    starts: usize,
    seed: u64,
    opts: &SearchOptions,
) -> SearchResult {
    let starts = starts.max(1);
    let k = pattern.k;
    if k == 0 {
        return SearchResult {
            best_residual: u.distance_up_to_sign(&Su2Element::IDENTITY),
            best_angles: Vec::new(),
            evaluations: 1,
            seed,
        };
    }
    let labels = pattern.labels();
    let obj = Objective {
        axes: labels.iter().map(|&l| axis_of(pair, l)).collect(),
        target: u,
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    let per_start = |i: usize| -> (f64, Vec<f64>, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut x: Vec<f64> = (0..k).map(|_| rng.random_range(-two_pi..two_pi)).collect();
        let f = |a: &[f64]| obj.eval(a);
        let mut fx = f(&x);
        let mut evals = 1u64;
        let budget = opts.max_evals_per_dim * k;
        let mut scale = 0.5;
        for _ in 0..=opts.restarts {
            if fx <= opts.stop_below {
                break;
            }
            let (xn, fnew, e) = nelder_mead(&f, &x, scale, budget, opts.stop_below);
            evals += e as u64;
            if fnew <= fx {
                x = xn;
                fx = fnew;
            }
            scale = (scale * 0.1).max(1e-6);
        }
        let residual = obj.product(&x).distance_up_to_sign(u);
        (residual, x, evals)
    };
    let runs: Vec<(f64, Vec<f64>, u64)> = (0..starts).into_par_iter().map(per_start).collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best_residual, best_angles, _) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");
    SearchResult {
        best_residual,
        best_angles,
        evaluations,
        seed,
    }
}

/// Evidence that the closed-form count is attained and cannot be beaten.
#[derive(Debug, Clone)]
pub struct MinimalityCertificate {
    pub n_min: u32,
    pub report: CountReport,
    pub decomposition: Decomposition,
    pub bounds: GeodesicBounds,
    /// Searches over every pattern one factor shorter than `n_min`.
    pub shorter: Vec<(PatternSpec, SearchResult)>,
    pub feasible: bool,
    pub shorter_infeasible: bool,
    pub passed: bool,
}

/// Checks that an explicit `n_min`-factor product reaches `u` and that
/// neither alternating pattern of length `n_min - 1` does.
pub fn minimality_certificate(
    u: &Su2Element,
    m: &Axis,
    n: &Axis,
    starts: usize,
    seed: u64,
) -> Result<MinimalityCertificate> {
    let pair = AxisPair::new(m, n)?;
    minimality_certificate_in_pair(u, &pair, starts, seed)
}

pub fn minimality_certificate_in_pair(
    u: &Su2Element,
    pair: &AxisPair,
    starts: usize,
    seed: u64,
) -> Result<MinimalityCertificate> {
    let (d, report) = decompose_in_pair(u, pair, &SynthesisOptions::default())?;
    let bounds = bounds_of_decomposition(&d)?;
    let feasible = d.residual <= RECON_RESIDUAL && d.count as u32 == report.n_min;
    let shorter: Vec<(PatternSpec, SearchResult)> = if report.n_min >= 2 {
        [AxisLabel::M, AxisLabel::N]
            .into_iter()
            .map(|first| {
                let p = PatternSpec::new(report.n_min as usize - 1, first);
                (p, numeric_search(u, pair, p, starts, seed))
            })
            .collect()
    } else {
        Vec::new()
    };
    let shorter_infeasible = shorter
        .iter()
        .all(|(_, r)| r.best_residual > INFEASIBLE_RESIDUAL);
    Ok(MinimalityCertificate {
        n_min: report.n_min,
        report,
        passed: feasible && bounds.all_hold() && shorter_infeasible,
        decomposition: d,
        bounds,
        shorter,
        feasible,
        shorter_infeasible,
    })
}
