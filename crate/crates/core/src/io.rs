//! JSON instances and certificates, and the command implementations behind
//! the `biaxial` binary.
//!
//! Factor lists are written in product order: the first entry is the
//! leftmost factor and the last entry is applied first.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::counting::{count_in_pair, worst_case_witness, AxisPair, CountReport, Parity};
use crate::error::Error;
use crate::oracle::{geodesic_bounds, minimality_certificate_in_pair, relabel_to_pair, GeodesicBounds};
use crate::rotation::{
    canonical_lift, compose, from_so3_with_tolerance, rot, Axis, EulerTriple, So3Matrix,
    Su2Element,
};
use crate::synthesis::{alternates, decompose_in_pair, recompose, Factor, SynthesisOptions};
use crate::tolerance::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PARALLEL: i32 = 3;
pub const EXIT_RESIDUAL: i32 = 4;

/// Slack allowed over a certificate's declared residual when replaying it.
pub const VERIFY_SLACK: f64 = 1e-12;

pub const ORDER: &str = "right-to-left";

/// Target rotation in one of the accepted encodings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `(w, x, y, z)`.
    Su2([f64; 4]),
    /// Row-major 3x3 rotation matrix, lifted canonically.
    So3([f64; 9]),
    AxisAngle { axis: [f64; 3], angle: f64 },
    /// `R_z(alpha) R_y(beta) R_z(gamma)`.
    EulerZyz([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub m: [f64; 3],
    pub n: [f64; 3],
    pub target: Target,
}

/// Only the axes; used by `worst-case`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxesInput {
    pub m: [f64; 3],
    pub n: [f64; 3],
}

/// How an SU(2) target was obtained from the input encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lift {
    Direct,
    Canonical,
    AxisAngle,
    EulerZyz,
    Witness,
}

impl Target {
    pub fn resolve(&self, tol: &Tolerances) -> Result<(Su2Element, Lift), Error> {
        match *self {
            Target::Su2(q) => Ok((Su2Element::with_tolerance(q, tol.norm)?, Lift::Direct)),
            Target::So3(v) => {
                let d = So3Matrix::from_row_major(v, tol.norm)?;
                let u = from_so3_with_tolerance(&d, tol.norm)?;
                Ok((canonical_lift(&u, tol.norm), Lift::Canonical))
            }
            Target::AxisAngle { axis, angle } => {
                let a = Axis::with_tolerance(axis, tol.norm)?;
                Ok((rot(&a, angle), Lift::AxisAngle))
            }
            Target::EulerZyz([a, b, c]) => {
                let u = compose(
                    &compose(&rot(&Axis::Z, a), &rot(&Axis::Y, b)),
                    &rot(&Axis::Z, c),
                );
                Ok((u, Lift::EulerZyz))
            }
        }
    }
}

/// Count data carried inside a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub n_min: u32,
    pub m_odd: u32,
    pub m_even_mn: u32,
    pub m_even_nm: u32,
    pub chosen_parity: Parity,
    pub delta: f64,
    pub euler: EulerTriple,
    pub beta: f64,
    pub beta_prime: f64,
    pub lowenthal: u32,
    pub m_flipped: bool,
    pub swapped: bool,
}

impl From<&CountReport> for ReportJson {
    fn from(r: &CountReport) -> Self {
        ReportJson {
            n_min: r.n_min,
            m_odd: r.m_odd,
            m_even_mn: r.m_even_mn,
            m_even_nm: r.m_even_nm,
            chosen_parity: r.chosen_parity,
            delta: r.pair.delta,
            euler: r.euler,
            beta: r.beta,
            beta_prime: r.beta_prime,
            lowenthal: r.lowenthal,
            m_flipped: r.pair.m_flipped,
            swapped: r.pair.swapped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub m: [f64; 3],
    pub n: [f64; 3],
    /// The SU(2) element the factors reproduce.
    pub target: [f64; 4],
    pub lift: Lift,
    pub count: u32,
    pub parity: Parity,
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<Factor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default)]
    pub trimmed: bool,
    pub lowenthal: u32,
    pub report: ReportJson,
}

/// Options shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tol: Tolerances,
    pub trim: bool,
    pub starts: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            trim: false,
            starts: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Count,
    Decompose,
    Verify,
    WorstCase,
    Oracle,
}

/// A failed item: exit code and message.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::AxesParallel { .. } => EXIT_PARALLEL,
            Error::InvalidAxis { .. }
            | Error::NonUnitQuaternion { .. }
            | Error::InvalidRotation(_)
            | Error::Pattern(_) => EXIT_PARSE,
            Error::InvalidFrame { .. } | Error::InvalidSlab { .. } | Error::InfeasibleSlab { .. } => {
                EXIT_RESIDUAL
            }
        };
        Failure::new(code, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

type Outcome = std::result::Result<(Value, i32), Failure>;

fn pair_of(m: [f64; 3], n: [f64; 3], tol: &Tolerances) -> Result<(Axis, Axis, AxisPair), Error> {
    let am = Axis::with_tolerance(m, tol.norm)?;
    let an = Axis::with_tolerance(n, tol.norm)?;
    let pair = AxisPair::with_tolerances(&am, &an, *tol)?;
    Ok((am, an, pair))
}

fn certificate(
    m: [f64; 3],
    n: [f64; 3],
    u: &Su2Element,
    lift: Lift,
    report: &CountReport,
) -> Certificate {
    Certificate {
        m,
        n,
        target: u.to_array(),
        lift,
        count: report.n_min,
        parity: report.chosen_parity,
        order: ORDER.to_string(),
        factors: None,
        residual: None,
        trimmed: false,
        lowenthal: report.lowenthal,
        report: report.into(),
    }
}

pub fn cmd_count(inst: &ProblemInstance, opts: &RunOptions) -> Result<Certificate, Failure> {
    let (_, _, pair) = pair_of(inst.m, inst.n, &opts.tol)?;
    let (u, lift) = inst.target.resolve(&opts.tol)?;
    let report = count_in_pair(&u, &pair);
    Ok(certificate(inst.m, inst.n, &u, lift, &report))
}

fn decompose_target(
    m: [f64; 3],
    n: [f64; 3],
    u: &Su2Element,
    lift: Lift,
    pair: &AxisPair,
    opts: &RunOptions,
) -> Result<Certificate, Failure> {
    let sopts = SynthesisOptions {
        trim: opts.trim,
        ..SynthesisOptions::default()
    };
    let (d, report) = decompose_in_pair(u, pair, &sopts)?;
    if d.residual > opts.tol.recon {
        return Err(Failure::new(
            EXIT_RESIDUAL,
            format!("reconstruction residual {} exceeds {}", d.residual, opts.tol.recon),
        ));
    }
    let mut c = certificate(m, n, u, lift, &report);
    c.count = d.factors.len() as u32;
    c.factors = Some(d.factors);
    c.residual = Some(d.residual);
    c.trimmed = opts.trim;
    Ok(c)
}

pub fn cmd_decompose(inst: &ProblemInstance, opts: &RunOptions) -> Result<Certificate, Failure> {
    let (_, _, pair) = pair_of(inst.m, inst.n, &opts.tol)?;
    let (u, lift) = inst.target.resolve(&opts.tol)?;
    decompose_target(inst.m, inst.n, &u, lift, &pair, opts)
}

pub fn cmd_worst_case(axes: &AxesInput, opts: &RunOptions) -> Result<Certificate, Failure> {
    let (_, _, pair) = pair_of(axes.m, axes.n, &opts.tol)?;
    let u = worst_case_witness(&pair);
    decompose_target(axes.m, axes.n, &u, Lift::Witness, &pair, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub ok: bool,
    pub residual: f64,
    pub declared_residual: f64,
    pub alternates: bool,
    pub count_matches: bool,
    pub bounds: Option<GeodesicBounds>,
}

/// Replays a certificate's factors against its own target. Counts are not
/// recomputed.
pub fn cmd_verify(cert: &Certificate, opts: &RunOptions) -> Result<VerifyOutput, Failure> {
    let factors = cert
        .factors
        .as_ref()
        .filter(|f| !f.is_empty())
        .ok_or_else(|| Failure::new(EXIT_PARSE, "certificate has no factors"))?;
    let (am, an, pair) = pair_of(cert.m, cert.n, &opts.tol)?;
    let [w, x, y, z] = cert.target;
    let u = Su2Element::with_tolerance([w, x, y, z], opts.tol.norm)?;
    let declared = cert
        .residual
        .ok_or_else(|| Failure::new(EXIT_PARSE, "certificate has no residual"))?;
    let axes = (am, an);
    let residual = recompose(factors, &axes).distance(&u);
    let alt = alternates(factors);
    let bounds = if alt {
        Some(geodesic_bounds(&relabel_to_pair(factors, &axes, &pair)?, &pair)?)
    } else {
        None
    };
    let count_matches = cert.count as usize == factors.len();
    let ok = residual.is_finite()
        && residual <= declared + VERIFY_SLACK
        && alt
        && count_matches
        && bounds.as_ref().is_some_and(|r| r.all_hold());
    Ok(VerifyOutput {
        ok,
        residual,
        declared_residual: declared,
        alternates: alt,
        count_matches,
        bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShorterPattern {
    pub k: usize,
    pub first_axis: crate::synthesis::AxisLabel,
    pub best_residual: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    pub passed: bool,
    pub n_min: u32,
    pub residual: f64,
    pub feasible: bool,
    pub shorter_infeasible: bool,
    pub bounds: GeodesicBounds,
    pub shorter: Vec<ShorterPattern>,
    pub starts: usize,
    pub seed: u64,
}

pub fn cmd_oracle(inst: &ProblemInstance, opts: &RunOptions) -> Result<OracleOutput, Failure> {
    let (_, _, pair) = pair_of(inst.m, inst.n, &opts.tol)?;
    let (u, _) = inst.target.resolve(&opts.tol)?;
    let c = minimality_certificate_in_pair(&u, &pair, opts.starts, opts.seed)?;
    Ok(OracleOutput {
        passed: c.passed,
        n_min: c.n_min,
        residual: c.decomposition.residual,
        feasible: c.feasible,
        shorter_infeasible: c.shorter_infeasible,
        bounds: c.bounds,
        shorter: c
            .shorter
            .iter()
            .map(|(p, r)| ShorterPattern {
                k: p.k,
                first_axis: p.first_axis,
                best_residual: r.best_residual,
                evaluations: r.evaluations,
            })
            .collect(),
        starts: opts.starts,
        seed: opts.seed,
    })
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn run_one(cmd: Command, item: Value, opts: &RunOptions) -> Outcome {
    match cmd {
        Command::Count => {
            let inst: ProblemInstance = serde_json::from_value(item)?;
            Ok((json(&cmd_count(&inst, opts)?), EXIT_OK))
        }
        Command::Decompose => {
            let inst: ProblemInstance = serde_json::from_value(item)?;
            Ok((json(&cmd_decompose(&inst, opts)?), EXIT_OK))
        }
        Command::WorstCase => {
            let axes: AxesInput = serde_json::from_value(item)?;
            Ok((json(&cmd_worst_case(&axes, opts)?), EXIT_OK))
        }
        Command::Verify => {
            let cert: Certificate = serde_json::from_value(item)?;
            let out = cmd_verify(&cert, opts)?;
            let code = if out.ok { EXIT_OK } else { EXIT_FAIL };
            Ok((json(&out), code))
        }
        Command::Oracle => {
            let inst: ProblemInstance = serde_json::from_value(item)?;
            let out = cmd_oracle(&inst, opts)?;
            let code = if out.passed { EXIT_OK } else { EXIT_FAIL };
            Ok((json(&out), code))
        }
    }
}

fn error_value(f: &Failure) -> Value {
    serde_json::json!({ "error": f.message, "code": f.code })
}

/// Runs a command on JSON text holding one item or an array of items.
/// Returns the output document and the exit code; in batch mode the exit
/// code is the largest over all items and failed items are reported in
/// place.
pub fn run(cmd: Command, input: &str, opts: &RunOptions) -> (String, i32) {
    let doc: Value = match serde_json::from_str(input) {
        Ok(v) => v,
        Err(e) => {
            let f = Failure::from(e);
            return (error_value(&f).to_string(), f.code);
        }
    };
    let (out, code) = match doc {
        Value::Array(items) => {
            let results: Vec<(Value, i32)> = items
                .into_par_iter()
                .map(|item| match run_one(cmd, item, opts) {
                    Ok(r) => r,
                    Err(f) => (error_value(&f), f.code),
                })
                .collect();
            let code = results.iter().map(|r| r.1).max().unwrap_or(EXIT_OK);
            (Value::Array(results.into_iter().map(|r| r.0).collect()), code)
        }
        item => match run_one(cmd, item, opts) {
            Ok(r) => r,
            Err(f) => (error_value(&f), f.code),
        },
    };
    let text = serde_json::to_string_pretty(&out).expect("serializable output");
    (text, code)
}

/// Parses a tolerance given on the command line or in the environment.
pub fn parse_tol(s: &str) -> Result<f64, Failure> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(Failure::new(EXIT_PARSE, format!("invalid tolerance {s:?}"))),
    }
}
