//! Registry of bundled test problems, gradient validation, and start-point sampling.
//!
//! Every problem carries an analytic Jacobian and a sampling box. The box is only
//! used to draw starting points; solvers iterate unconstrained.

mod formulas;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Jacobian, Problem};
use formulas::Formula;

#[derive(Debug, Clone, Copy)]
enum Bounds {
    /// Same interval in every coordinate.
    Uniform(f64, f64),
    Explicit(&'static [f64], &'static [f64]),
}

/// Static description of one registry entry.
#[derive(Debug, Clone, Copy)]
pub struct ProblemInfo {
    pub name: &'static str,
    /// Objective count; `None` means `m = n`.
    objectives: Option<usize>,
    pub default_n: usize,
    pub scalable: bool,
    bounds: Bounds,
    /// Convexity of the transcribed formulas, checked by Hessian spot tests.
    pub convex: bool,
    /// Convexity as listed in the benchmark's problem table.
    pub listed_convex: bool,
    pub source: &'static str,
    formula: Formula,
}

impl ProblemInfo {
    pub fn num_objectives(&self, n: usize) -> usize {
        self.objectives.unwrap_or(n)
    }
}

const HUBAND: &str = "Huband, Hingston, Barone, While (2006), A review of multiobjective test problems and a scalable test problem toolkit, IEEE Trans. Evol. Comput. 10(5)";
const ANSARY: &str = "Ansary, Panda (2015), A modified quasi-Newton method for vector optimization problem, Optimization 64(11)";
const LOVISON: &str = "Lovison (2011), Singular continuation: generating piecewise linear approximations to Pareto sets via global analysis, SIAM J. Optim. 21(2)";
const MMR: &str = "Miglierina, Molho, Recchioni (2008), Box-constrained multi-objective optimization: a gradient-like method without a priori scalarization, Eur. J. Oper. Res. 188(3)";
const WITTING: &str = "Witting (2012), Numerical algorithms for the treatment of parametric multiobjective optimization problems and applications, PhD thesis, Univ. Paderborn, Example 4.2";

macro_rules! entry {
    ($name:expr, $m:expr, $n:expr, $scalable:expr, $bounds:expr, $convex:expr, $listed:expr, $source:expr, $formula:expr) => {
        ProblemInfo {
            name: $name,
            objectives: $m,
            default_n: $n,
            scalable: $scalable,
            bounds: $bounds,
            convex: $convex,
            listed_convex: $listed,
            source: $source,
            formula: $formula,
        }
    };
}

/// All registered problems in table order.
pub static REGISTRY: &[ProblemInfo] = &[
    entry!("AP2", Some(2), 1, false, Bounds::Uniform(-100.0, 100.0), true, true, ANSARY, Formula::Ap2),
    entry!("AP4", Some(3), 3, false, Bounds::Uniform(-10.0, 10.0), true, true, ANSARY, Formula::Ap4),
    entry!("BK1", Some(2), 2, false, Bounds::Uniform(-5.0, 10.0), true, true, HUBAND, Formula::Bk1),
    entry!("DGO1", Some(2), 1, false, Bounds::Uniform(-10.0, 13.0), false, false, HUBAND, Formula::Dgo1),
    entry!("DGO2", Some(2), 1, false, Bounds::Uniform(-9.0, 9.0), true, true, HUBAND, Formula::Dgo2),
    entry!("Far1", Some(2), 2, false, Bounds::Uniform(-1.0, 1.0), false, false, HUBAND, Formula::Far1),
    entry!(
        "FDS", Some(3), 10, true, Bounds::Uniform(-2.0, 2.0), true, true,
        "Fliege, Grana Drummond, Svaiter (2009), Newton's method for multiobjective optimization, SIAM J. Optim. 20(2)",
        Formula::Fds
    ),
    entry!("FF1", Some(2), 2, false, Bounds::Uniform(-1.0, 1.0), false, false, HUBAND, Formula::Ff1),
    entry!(
        "Hil1", Some(2), 2, false, Bounds::Uniform(0.0, 1.0), false, false,
        "Hillermeier (2001), Nonlinear multiobjective optimization: a generalized homotopy approach, Birkhauser",
        Formula::Hil1
    ),
    entry!(
        "JOS1", Some(2), 50, true, Bounds::Uniform(-100.0, 100.0), true, true,
        "Jin, Olhofer, Sendhoff (2001), Dynamic weighted aggregation for evolutionary multi-objective optimization: why does it work and how?, GECCO",
        Formula::Jos1
    ),
    entry!("KW2", Some(2), 2, false, Bounds::Uniform(-3.0, 3.0), false, false, LOVISON, Formula::Kw2),
    entry!("Lov1", Some(2), 2, false, Bounds::Uniform(-10.0, 10.0), true, true, LOVISON, Formula::Lov1),
    entry!("Lov3", Some(2), 2, false, Bounds::Uniform(-20.0, 20.0), false, false, LOVISON, Formula::Lov3),
    entry!("Lov4", Some(2), 2, false, Bounds::Uniform(-20.0, 20.0), false, false, LOVISON, Formula::Lov4),
    entry!(
        "MGH33", None, 10, true, Bounds::Uniform(-1.0, 1.0), true, true,
        "More, Garbow, Hillstrom (1981), Testing unconstrained optimization software, ACM TOMS 7(1), problem 33 (linear function, rank 1), one squared residual per objective",
        Formula::Mgh33
    ),
    entry!("MHHM2", Some(3), 2, false, Bounds::Uniform(0.0, 1.0), true, true, HUBAND, Formula::Mhhm2),
    entry!("MLF1", Some(2), 1, false, Bounds::Uniform(0.0, 20.0), false, false, HUBAND, Formula::Mlf1),
    entry!("MLF2", Some(2), 2, false, Bounds::Uniform(-100.0, 100.0), false, false, HUBAND, Formula::Mlf2),
    entry!("MMR1", Some(2), 2, false, Bounds::Explicit(&[0.1, 0.0], &[1.0, 1.0]), false, false, MMR, Formula::Mmr1),
    entry!("MOP3", Some(2), 2, false, Bounds::Uniform(-std::f64::consts::PI, std::f64::consts::PI), false, false, MMR, Formula::Mop3),
    entry!(
        "PNR", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true,
        "Preuss, Naujoks, Rudolph (2006), Pareto set and EMOA behavior for simple multimodal multiobjective functions, PPSN IX",
        Formula::Pnr
    ),
    entry!("SP1", Some(2), 2, false, Bounds::Uniform(-100.0, 100.0), true, true, HUBAND, Formula::Sp1),
    entry!(
        "TOI4", Some(2), 4, false, Bounds::Uniform(-2.0, 2.0), true, true,
        "Toint (1983), Test problems for partially separable optimization and results for the routine PSPMIN, Tech. Rep. 83/4, FUNDP Namur; bi-objective adaptation",
        Formula::Toi4
    ),
    entry!("WIT1", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), true, true, WITTING, Formula::Wit(0.0)),
    entry!("WIT2", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true, WITTING, Formula::Wit(0.5)),
    entry!("WIT3", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true, WITTING, Formula::Wit(0.9)),
    entry!("WIT4", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true, WITTING, Formula::Wit(0.99)),
    entry!("WIT5", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true, WITTING, Formula::Wit(0.999)),
    entry!("WIT6", Some(2), 2, false, Bounds::Uniform(-2.0, 2.0), false, true, WITTING, Formula::Wit(1.0)),
];

/// Registry entry for `name`, matched case-insensitively.
pub fn problem_info(name: &str) -> Option<&'static ProblemInfo> {
    REGISTRY.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

/// A concrete registered problem at a fixed dimension.
#[derive(Debug, Clone)]
pub struct TestProblem {
    info: &'static ProblemInfo,
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TestProblem {
    pub fn info(&self) -> &'static ProblemInfo {
        self.info
    }

    /// `NAME` at the default dimension, `NAME:n` otherwise.
    pub fn label(&self) -> String {
        if self.dim() == self.info.default_n {
            self.info.name.to_string()
        } else {
            format!("{}:{}", self.info.name, self.dim())
        }
    }
}

impl Problem for TestProblem {
    fn name(&self) -> &str {
        self.info.name
    }

    fn num_objectives(&self) -> usize {
        self.m
    }

    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn lower_bound(&self) -> &[f64] {
        &self.lower
    }

    fn upper_bound(&self) -> &[f64] {
        &self.upper
    }

    fn is_convex(&self) -> bool {
        self.info.convex
    }

    fn evaluate(&self, x: &[f64], out: &mut [f64]) {
        self.info.formula.evaluate(x, out);
    }

    fn jacobian(&self, x: &[f64], jac: &mut Jacobian) {
        self.info.formula.jacobian(x, jac);
    }
}

/// Looks up `name` and instantiates it, at `n_override` variables for scalable problems.
pub fn get_problem(name: &str, n_override: Option<usize>) -> Result<TestProblem> {
    let info = problem_info(name).ok_or_else(|| Error::UnknownProblem(name.to_string()))?;
    let n = match n_override {
        None => info.default_n,
        Some(n) if !info.scalable && n != info.default_n => {
            return Err(Error::InvalidDimension {
                problem: info.name.to_string(),
                reason: format!("fixed at n = {}, got {n}", info.default_n),
            })
        }
        Some(0) => {
            return Err(Error::InvalidDimension {
                problem: info.name.to_string(),
                reason: "n must be at least 1".to_string(),
            })
        }
        Some(n) => n,
    };
    let (lower, upper) = match info.bounds {
        Bounds::Uniform(lo, hi) => (vec![lo; n], vec![hi; n]),
        Bounds::Explicit(lo, hi) => (lo.to_vec(), hi.to_vec()),
    };
    Ok(TestProblem {
        info,
        m: info.num_objectives(n),
        lower,
        upper,
    })
}

/// Problem reference of the form `NAME` or `NAME:n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub n: Option<usize>,
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, n: Option<usize>) -> Self {
        Self {
            name: name.into(),
            n,
        }
    }

    pub fn instantiate(&self) -> Result<TestProblem> {
        get_problem(&self.name, self.n)
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, n) = match s.split_once(':') {
            None => (s, None),
            Some((name, n)) => {
                let n = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad dimension in problem spec `{s}`")))?;
                (name.trim(), Some(n))
            }
        };
        if name.is_empty() {
            return Err(Error::Parse(format!("empty problem name in `{s}`")));
        }
        Ok(Self::new(name, n))
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) => write!(f, "{}:{n}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

/// The full benchmark set: every registry entry at its default size, with JOS1
/// additionally at 100, 1000 and 5000 variables.
pub fn standard_suite() -> Vec<ProblemSpec> {
    let mut out = Vec::with_capacity(REGISTRY.len() + 3);
    for info in REGISTRY {
        if info.name == "JOS1" {
            for n in [50, 100, 1000, 5000] {
                out.push(ProblemSpec::new(info.name, Some(n)));
            }
        } else {
            out.push(ProblemSpec::new(info.name, None));
        }
    }
    out
}

/// Maximum relative error between the analytic Jacobian and central differences.
///
/// The step in coordinate `j` is `h * max(1, |x_j|)`; the error of entry `(i, j)`
/// is measured relative to `max(1, |analytic_ij|)`.
pub fn check_jacobian<P: Problem + ?Sized>(problem: &P, x: &[f64], h: f64) -> f64 {
    let m = problem.num_objectives();
    let analytic = problem.gradients(x);
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; m];
    let mut fm = vec![0.0; m];
    let mut worst = 0.0f64;
    for j in 0..x.len() {
        let hj = h * x[j].abs().max(1.0);
        xp[j] = x[j] + hj;
        problem.evaluate(&xp, &mut fp);
        xp[j] = x[j] - hj;
        problem.evaluate(&xp, &mut fm);
        xp[j] = x[j];
        // the true spacing after rounding x_j +- h_j
        let span = (x[j] + hj) - (x[j] - hj);
        for i in 0..m {
            let fd = (fp[i] - fm[i]) / span;
            let a = analytic.get(i, j);
            let err = (a - fd).abs() / a.abs().max(1.0);
            worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
        }
    }
    worst
}

/// Seed and count for uniform start-point sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub seed: u64,
    pub count: usize,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            count: 100,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

pub const SAMPLER_DESCRIPTION: &str = "ChaCha8 (rand_chacha 0.9). Per problem, key = splitmix64(seed XOR fnv1a64(name ':' n)); \
the generator is seeded with ChaCha8Rng::seed_from_u64(key) and start i uses stream i (set_stream). \
Coordinate j = lo_j + u (hi_j - lo_j) with u = (next_u64 >> 11) * 2^-53, clamped to [lo_j, hi_j].";

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn problem_key<P: Problem + ?Sized>(problem: &P, seed: u64) -> u64 {
    let tag = format!("{}:{}", problem.name(), problem.dim());
    splitmix64(seed ^ fnv1a64(tag.as_bytes()))
}

/// Start `index` of the deterministic start sequence for `problem`.
pub fn sample_start<P: Problem + ?Sized>(problem: &P, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem_key(problem, seed));
    rng.set_stream(index as u64);
    problem
        .lower_bound()
        .iter()
        .zip(problem.upper_bound())
        .map(|(&lo, &hi)| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            (lo + u * (hi - lo)).clamp(lo, hi)
        })
        .collect()
}

/// `spec.count` starts drawn uniformly from the problem's sampling box.
pub fn sample_starts<P: Problem + ?Sized>(problem: &P, spec: &SamplerSpec) -> Vec<Vec<f64>> {
    (0..spec.count)
        .map(|i| sample_start(problem, spec.seed, i))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub scalable: bool,
    pub convex: bool,
    pub listed_convex: bool,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub source: String,
}

/// Machine-readable registry listing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub problems: Vec<ManifestEntry>,
    /// Benchmark problems that are not registered.
    pub omitted: Vec<String>,
    pub standard_suite: Vec<String>,
    pub sampler: String,
}

pub fn manifest() -> Manifest {
    let problems = REGISTRY
        .iter()
        .map(|info| {
            let p = get_problem(info.name, None).expect("registry entries instantiate");
            ManifestEntry {
                name: info.name.to_string(),
                m: p.num_objectives(),
                n: p.dim(),
                scalable: info.scalable,
                convex: info.convex,
                listed_convex: info.listed_convex,
                lower: p.lower.clone(),
                upper: p.upper.clone(),
                source: info.source.to_string(),
            }
        })
        .collect();
    Manifest {
        problems,
        omitted: Vec::new(),
        standard_suite: standard_suite().iter().map(ToString::to_string).collect(),
        sampler: SAMPLER_DESCRIPTION.to_string(),
    }
}
