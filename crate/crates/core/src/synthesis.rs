//! Explicit factor sequences attaining the minimal count.
//!
//! Factor lists are stored in written order: `factors[0]` is the leftmost
//! matrix of the product, so the last entry is applied first.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::counting::{ceil_snapped_with, count_in_pair, AxisPair, CountReport, Parity};
use crate::error::{Error, Result};
use crate::rotation::{compose, inverse, reduce_angle, rot, Axis, Su2Element};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisLabel {
    #[serde(rename = "m")]
    M,
    #[serde(rename = "n")]
    N,
}

impl AxisLabel {
    pub fn other(self) -> Self {
        match self {
            AxisLabel::M => AxisLabel::N,
            AxisLabel::N => AxisLabel::M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub axis: AxisLabel,
    pub angle: f64,
}

impl Factor {
    pub fn new(axis: AxisLabel, angle: f64) -> Self {
        Self {
            axis,
            angle: reduce_angle(angle),
        }
    }
}

/// Which of the two solution families of a slab triple to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// How the middle angle was split into slabs, and the triple chosen for each.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    pub parity: Parity,
    pub delta: f64,
    pub slabs: Vec<f64>,
    pub t_params: Vec<f64>,
    pub branches: Vec<Branch>,
    /// `n`-rotation angle of each slab triple.
    pub thetas: Vec<f64>,
}

/// Free parameters of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthesisOptions {
    /// `t` for every slab whose parameter is not forced.
    pub t: f64,
    pub branch: Branch,
    /// Drop zero-angle factors and merge the neighbours they separated.
    pub trim: bool,
}

/// An ordered product of rotations about two axes realizing `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub factors: Vec<Factor>,
    pub target: Su2Element,
    /// Vectors that the labels `m` and `n` refer to.
    pub axes: (Axis, Axis),
    pub pair: AxisPair,
    pub residual: f64,
    pub count: usize,
    pub plan: Option<SynthesisPlan>,
}

impl Decomposition {
    fn assemble(
        factors: Vec<Factor>,
        target: &Su2Element,
        axes: (Axis, Axis),
        pair: &AxisPair,
        plan: Option<SynthesisPlan>,
    ) -> Self {
        let factors = cancel_full_turns(factors);
        let residual = recompose(&factors, &axes).distance(target);
        Decomposition {
            count: factors.len(),
            factors,
            target: *target,
            axes,
            pair: *pair,
            residual,
            plan,
        }
    }

    pub fn product(&self) -> Su2Element {
        recompose(&self.factors, &self.axes)
    }
}

/// A factor of angle `2pi` is `-I`. Such factors are zeroed in pairs, which
/// leaves the product unchanged.
fn cancel_full_turns(mut factors: Vec<Factor>) -> Vec<Factor> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let full: Vec<usize> = (0..factors.len())
        .filter(|&i| (factors[i].angle.abs() - two_pi).abs() <= 1e-12)
        .collect();
    for &i in &full[..full.len() - full.len() % 2] {
        factors[i].angle = 0.0;
    }
    factors
}

/// Multiplies the factors out in written order.
pub fn recompose(factors: &[Factor], axes: &(Axis, Axis)) -> Su2Element {
    factors.iter().fold(Su2Element::IDENTITY, |acc, f| {
        let v = match f.axis {
            AxisLabel::M => &axes.0,
            AxisLabel::N => &axes.1,
        };
        compose(&acc, &rot(v, f.angle))
    })
}

/// `H_t(beta, delta)`.
pub fn h_param(beta_tilde: f64, delta: f64, t: f64) -> Result<f64> {
    h_param_with(beta_tilde, delta, t, Tolerances::default().angle)
}

pub fn h_param_with(beta_tilde: f64, delta: f64, t: f64, eps: f64) -> Result<f64> {
    let half = 0.5 * beta_tilde;
    if !(delta > 0.0 && delta <= FRAC_PI_2 + eps && half >= -eps && half <= delta + eps) {
        return Err(Error::InvalidSlab {
            beta: beta_tilde,
            delta,
        });
    }
    if (delta - FRAC_PI_2).abs() <= eps {
        return Ok(if (half - delta).abs() <= eps { t } else { 0.0 });
    }
    // arcsin(tan(b)/tan(delta)) written as an atan2 that stays exact at
    // b = delta, where the arcsin argument rounds near 1.
    let half = half.clamp(0.0, delta);
    Ok((half.sin() * delta.cos()).atan2(slab_gap(half, delta)))
}

/// `sqrt(sin^2(delta) - sin^2(b))`, shared by `H_t` and the slab's
/// `n` angle so the two stay consistent near `b = delta`.
fn slab_gap(half: f64, delta: f64) -> f64 {
    ((delta - half).sin() * (delta + half).sin()).max(0.0).sqrt()
}

/// Angles `(alpha_j, gamma_j, theta_j)` with
/// `R_l(beta_j) = R_m(-alpha_j) R_n(theta_j) R_m(-gamma_j)`.
pub fn solve_triple(beta_j: f64, delta: f64, t: f64, branch: Branch) -> Result<(f64, f64, f64)> {
    solve_triple_with(beta_j, delta, t, branch, Tolerances::default().angle)
}

pub fn solve_triple_with(
    beta_j: f64,
    delta: f64,
    t: f64,
    branch: Branch,
    eps: f64,
) -> Result<(f64, f64, f64)> {
    if beta_j > 2.0 * delta + eps {
        return Err(Error::InfeasibleSlab {
            beta: beta_j,
            delta,
        });
    }
    let b = beta_j.clamp(0.0, 2.0 * delta);
    let h = h_param_with(b, delta, t, eps)?;
    // 2 arcsin(sin(b)/sin(delta))
    let theta = 2.0 * (0.5 * b).sin().atan2(slab_gap(0.5 * b, delta));
    Ok(match branch {
        Branch::Plus => (h - FRAC_PI_2, h + FRAC_PI_2, theta),
        Branch::Minus => (-h + FRAC_PI_2, -h + 1.5 * PI, 2.0 * PI - theta),
    })
}

/// Splits `beta` into `ceil(beta / 2 delta)` slabs `(2 delta, ..., rest)`.
/// An empty plan means a single `m` rotation suffices.
pub fn plan_odd(beta: f64, delta: f64) -> SynthesisPlan {
    plan_odd_with(beta, delta, &Tolerances::default(), &SynthesisOptions::default())
}

pub fn plan_odd_with(
    beta: f64,
    delta: f64,
    tol: &Tolerances,
    opts: &SynthesisOptions,
) -> SynthesisPlan {
    let k = if beta <= tol.angle {
        0
    } else {
        ceil_snapped_with(beta / (2.0 * delta), tol.ceil).max(1) as usize
    };
    let mut slabs = vec![2.0 * delta; k];
    if let Some(last) = slabs.last_mut() {
        *last = beta - 2.0 * delta * (k as f64 - 1.0);
    }
    SynthesisPlan {
        parity: Parity::Odd,
        delta,
        t_params: vec![opts.t; k],
        branches: vec![opts.branch; k],
        thetas: Vec::with_capacity(k),
        slabs,
    }
}

/// Solves every slab of a plan, filling `thetas`, and returns the
/// `(alpha_j, gamma_j)` pairs.
fn solve_plan(plan: &mut SynthesisPlan, tol: &Tolerances) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(plan.slabs.len());
    plan.thetas.clear();
    for j in 0..plan.slabs.len() {
        let (a, c, th) = solve_triple_with(
            plan.slabs[j],
            plan.delta,
            plan.t_params[j],
            plan.branches[j],
            tol.angle,
        )?;
        plan.thetas.push(th);
        out.push((a, c));
    }
    Ok(out)
}

/// Odd-length construction `m, n, m, ..., m` about the pair's own frame.
pub fn decompose_odd(u: &Su2Element, pair: &AxisPair) -> Result<Decomposition> {
    decompose_odd_with(u, pair, &SynthesisOptions::default())
}

pub fn decompose_odd_with(
    u: &Su2Element,
    pair: &AxisPair,
    opts: &SynthesisOptions,
) -> Result<Decomposition> {
    let e = pair.euler(u);
    let mut plan = plan_odd_with(e.beta, pair.delta, &pair.tol, opts);
    let triples = solve_plan(&mut plan, &pair.tol)?;
    let mut factors = Vec::with_capacity(2 * triples.len() + 1);
    if triples.is_empty() {
        factors.push(Factor::new(AxisLabel::M, e.alpha + e.gamma));
    } else {
        factors.push(Factor::new(AxisLabel::M, e.alpha - triples[0].0));
        for j in 0..triples.len() {
            factors.push(Factor::new(AxisLabel::N, plan.thetas[j]));
            let next_alpha = triples.get(j + 1).map_or(-e.gamma, |t| t.0);
            factors.push(Factor::new(AxisLabel::M, -triples[j].1 - next_alpha));
        }
    }
    Ok(Decomposition::assemble(
        factors,
        u,
        (pair.m, pair.n),
        pair,
        Some(plan),
    ))
}

/// Even-length construction with `n` leftmost and `m` rightmost.
pub fn decompose_even(u: &Su2Element, pair: &AxisPair) -> Result<Decomposition> {
    decompose_even_with(u, pair, &SynthesisOptions::default())
}

pub fn decompose_even_with(
    u: &Su2Element,
    pair: &AxisPair,
    opts: &SynthesisOptions,
) -> Result<Decomposition> {
    let tol = &pair.tol;
    let delta = pair.delta;
    // R_l(-delta) u = R_m(a') R_l(b') R_m(c')  =>  u = R_n(a') R_l(b' + delta) R_m(c')
    let shifted = compose(&rot(&pair.l, -delta), u);
    let e = pair.euler(&shifted);
    let total = e.beta + delta;

    let mut factors = Vec::new();
    let plan = if e.beta >= delta - tol.angle {
        let k = ceil_snapped_with(e.beta / (2.0 * delta) + 0.5, tol.ceil).max(1) as usize;
        let mut slabs = vec![2.0 * delta; k];
        if k > 1 {
            slabs[k - 1] = total - 2.0 * delta * (k as f64 - 1.0);
        }
        let mut t_params = vec![opts.t; k];
        // A full first slab with t = pi/2 has alpha_1 = 0, so the leading
        // n rotation merges with the slab's own n rotation.
        t_params[0] = FRAC_PI_2;
        let mut branches = vec![opts.branch; k];
        branches[0] = Branch::Plus;
        let mut plan = SynthesisPlan {
            parity: Parity::EvenMn,
            delta,
            slabs,
            t_params,
            branches,
            thetas: Vec::with_capacity(k),
        };
        let triples = solve_plan(&mut plan, tol)?;
        factors.push(Factor::new(
            AxisLabel::N,
            e.alpha - triples[0].0 + plan.thetas[0],
        ));
        for j in 1..k {
            factors.push(Factor::new(AxisLabel::M, -triples[j - 1].1 - triples[j].0));
            factors.push(Factor::new(AxisLabel::N, plan.thetas[j]));
        }
        factors.push(Factor::new(AxisLabel::M, -triples[k - 1].1 + e.gamma));
        plan
    } else {
        let mut plan = SynthesisPlan {
            parity: Parity::EvenMn,
            delta,
            slabs: vec![total],
            t_params: vec![opts.t],
            branches: vec![opts.branch],
            thetas: Vec::with_capacity(1),
        };
        let triples = solve_plan(&mut plan, tol)?;
        factors.push(Factor::new(AxisLabel::N, e.alpha));
        factors.push(Factor::new(AxisLabel::M, -triples[0].0));
        factors.push(Factor::new(AxisLabel::N, plan.thetas[0]));
        factors.push(Factor::new(AxisLabel::M, -triples[0].1 + e.gamma));
        plan
    };
    Ok(Decomposition::assemble(
        factors,
        u,
        (pair.m, pair.n),
        pair,
        Some(plan),
    ))
}

/// The auxiliary angle used by [`decompose_even`] for `u`.
pub fn even_beta_prime(u: &Su2Element, pair: &AxisPair) -> f64 {
    pair.euler(&compose(&rot(&pair.l, -pair.delta), u)).beta
}

/// Even-length construction with `m` leftmost and `n` rightmost, obtained
/// by decomposing `u^dagger` and reversing.
pub fn decompose_even_reversed(u: &Su2Element, pair: &AxisPair) -> Result<Decomposition> {
    decompose_even_reversed_with(u, pair, &SynthesisOptions::default())
}

pub fn decompose_even_reversed_with(
    u: &Su2Element,
    pair: &AxisPair,
    opts: &SynthesisOptions,
) -> Result<Decomposition> {
    let d = decompose_even_with(&inverse(u), pair, opts)?;
    let factors = d
        .factors
        .iter()
        .rev()
        .map(|f| Factor::new(f.axis, -f.angle))
        .collect();
    let plan = d.plan.map(|p| SynthesisPlan {
        parity: Parity::EvenNm,
        ..p
    });
    Ok(Decomposition::assemble(
        factors,
        u,
        (pair.m, pair.n),
        pair,
        plan,
    ))
}

/// Removes zero-angle factors and merges the same-axis neighbours left
/// adjacent. A list that would become empty keeps one zero factor.
pub fn trim_factors(factors: &[Factor], eps: f64) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        if f.angle.abs() <= eps {
            continue;
        }
        match out.last_mut() {
            Some(prev) if prev.axis == f.axis => {
                *prev = Factor::new(f.axis, prev.angle + f.angle);
                if prev.angle.abs() <= eps {
                    out.pop();
                }
            }
            _ => out.push(*f),
        }
    }
    if out.is_empty() {
        if let Some(f) = factors.first() {
            out.push(Factor::new(f.axis, 0.0));
        }
    }
    out
}

/// Optimal decomposition of `u` into rotations about the caller's axes.
pub fn decompose_min(u: &Su2Element, m_raw: &Axis, n_raw: &Axis) -> Result<Decomposition> {
    let pair = AxisPair::new(m_raw, n_raw)?;
    decompose_in_pair(u, &pair, &SynthesisOptions::default()).map(|(d, _)| d)
}

/// As [`decompose_min`] for a normalized pair. Factor labels refer to the
/// pair's original (unnormalized) axes.
pub fn decompose_in_pair(
    u: &Su2Element,
    pair: &AxisPair,
    opts: &SynthesisOptions,
) -> Result<(Decomposition, CountReport)> {
    let report = count_in_pair(u, pair);
    let gov = &report.pair;
    let d = match report.chosen_parity {
        Parity::Odd => decompose_odd_with(u, gov, opts)?,
        Parity::EvenMn => decompose_even_with(u, gov, opts)?,
        Parity::EvenNm => decompose_even_reversed_with(u, gov, opts)?,
    };

    // Back to the caller's axes: undo the exchange, then the sign flip of m
    // (a rotation about -m by theta is a rotation about m by -theta).
    let raw_m = if pair.m_flipped { -pair.m } else { pair.m };
    let raw_n = pair.n;
    let mut factors: Vec<Factor> = d
        .factors
        .iter()
        .map(|f| {
            let label = if gov.swapped { f.axis.other() } else { f.axis };
            let angle = if label == AxisLabel::M && pair.m_flipped {
                -f.angle
            } else {
                f.angle
            };
            Factor::new(label, angle)
        })
        .collect();
    if opts.trim {
        factors = trim_factors(&factors, pair.tol.angle);
    }
    let axes = (raw_m, raw_n);
    let p = recompose(&factors, &axes);
    if p.distance(&u.negate()) < p.distance(u) {
        if let Some(first) = factors.first_mut() {
            *first = Factor::new(first.axis, first.angle + 2.0 * PI);
        }
    }
    Ok((
        Decomposition::assemble(factors, u, axes, pair, d.plan),
        report,
    ))
}

/// Outcome of replaying a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub residual: f64,
    pub alternates: bool,
    pub count_matches: bool,
    pub nonempty: bool,
    /// Slab bounds and the slab solvability condition of the recorded plan.
    pub slabs_ok: bool,
}

impl VerifyReport {
    pub fn conforming(&self, residual_bound: f64) -> bool {
        self.residual <= residual_bound
            && self.alternates
            && self.count_matches
            && self.nonempty
            && self.slabs_ok
    }
}

pub fn alternates(factors: &[Factor]) -> bool {
    factors.windows(2).all(|w| w[0].axis != w[1].axis)
}

/// Replays the factors against the target and checks the structural
/// invariants of a decomposition.
pub fn verify_decomposition(d: &Decomposition) -> VerifyReport {
    let eps = d.pair.tol.angle;
    let slabs_ok = d.plan.as_ref().is_none_or(|p| {
        let bounds = p.slabs.iter().all(|&b| b > 0.0 && b <= 2.0 * p.delta + eps);
        let cond = p.slabs.iter().zip(&p.thetas).all(|(&b, &th)| {
            (p.delta.sin() * (0.5 * th).sin().abs() - (0.5 * b).sin().abs()).abs() <= 1e-12
        });
        bounds && cond && p.thetas.len() == p.slabs.len()
    });
    VerifyReport {
        residual: d.product().distance(&d.target),
        alternates: alternates(&d.factors),
        count_matches: d.count == d.factors.len(),
        nonempty: !d.factors.is_empty(),
        slabs_ok,
    }
}
