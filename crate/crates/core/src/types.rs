//! Shared numeric types: the problem abstraction, Jacobians, evaluation counters
//! and solver configuration.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major `m x n` Jacobian. Row `i` holds the gradient of objective `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Jacobian {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a Jacobian from gradient rows. Panics if the rows are ragged or empty.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        assert!(!rows.is_empty(), "a Jacobian needs at least one row");
        let cols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged Jacobian rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `J d`, the vector of directional derivatives.
    pub fn apply(&self, d: &[f64]) -> Vec<f64> {
        self.rows().map(|g| dot(g, d)).collect()
    }
}

/// A differentiable vector objective `F: R^n -> R^m` with analytic Jacobian.
///
/// The sampling box returned by [`Problem::lower_bound`] / [`Problem::upper_bound`]
/// is only used to draw initial points; solvers never project onto it.
/// Points outside the natural domain of a formula must yield non-finite values
/// so that the counted wrappers can report them.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    fn num_objectives(&self) -> usize;
    fn dim(&self) -> usize;
    fn lower_bound(&self) -> &[f64];
    fn upper_bound(&self) -> &[f64];
    fn is_convex(&self) -> bool;

    /// Writes `F(x)` into `out` (length `m`).
    fn evaluate(&self, x: &[f64], out: &mut [f64]);

    /// Writes `JF(x)` into `jac` (shape `m x n`).
    fn jacobian(&self, x: &[f64], jac: &mut Jacobian);

    fn values(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_objectives()];
        self.evaluate(x, &mut out);
        out
    }

    fn gradients(&self, x: &[f64]) -> Jacobian {
        let mut jac = Jacobian::zeros(self.num_objectives(), self.dim());
        self.jacobian(x, &mut jac);
        jac
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn lower_bound(&self) -> &[f64] {
        (**self).lower_bound()
    }
    fn upper_bound(&self) -> &[f64] {
        (**self).upper_bound()
    }
    fn is_convex(&self) -> bool {
        (**self).is_convex()
    }
    fn evaluate(&self, x: &[f64], out: &mut [f64]) {
        (**self).evaluate(x, out)
    }
    fn jacobian(&self, x: &[f64], jac: &mut Jacobian) {
        (**self).jacobian(x, jac)
    }
}

/// Per-run evaluation bookkeeping. One `f_evals` unit is one evaluation of the
/// whole vector `F`; one `g_evals` unit is one whole Jacobian.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub iterations: u64,
    pub f_evals: u64,
    pub g_evals: u64,
    #[serde(with = "duration_secs")]
    pub wall_time: Duration,
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

/// Evaluates `F(x)` and charges one function evaluation.
pub fn evaluate_counted<P: Problem + ?Sized>(
    problem: &P,
    x: &[f64],
    counters: &mut Counters,
) -> Result<Vec<f64>> {
    check_dim(problem.dim(), x.len())?;
    let mut out = vec![0.0; problem.num_objectives()];
    problem.evaluate(x, &mut out);
    counters.f_evals += 1;
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite {
            what: "objective value",
        })
    }
}

/// Evaluates `JF(x)` and charges one gradient evaluation.
pub fn jacobian_counted<P: Problem + ?Sized>(
    problem: &P,
    x: &[f64],
    counters: &mut Counters,
) -> Result<Jacobian> {
    check_dim(problem.dim(), x.len())?;
    let mut jac = Jacobian::zeros(problem.num_objectives(), problem.dim());
    problem.jacobian(x, &mut jac);
    counters.g_evals += 1;
    if jac.is_finite() {
        Ok(jac)
    } else {
        Err(Error::NonFinite { what: "Jacobian" })
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// The four descent methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Plain multi-objective steepest descent, `x+ = x + t v(x)`.
    Msd,
    /// Diagonal steepest descent: `x+ = x + t v(x) / tau`, tau from a modified secant equation.
    Mdsd,
    /// `x+ = x + t v(x) / tau`, tau fitted to the observed weighted decrease.
    Msd1,
    /// `x+ = x + theta t v(x)`, theta from one extra Jacobian at the Armijo trial point.
    Msd2,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [Self::Msd, Self::Mdsd, Self::Msd1, Self::Msd2];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Msd => "msd",
            Self::Mdsd => "mdsd",
            Self::Msd1 => "msd1",
            Self::Msd2 => "msd2",
        }
    }

    /// Display label used in tables and plots.
    pub fn label(self) -> &'static str {
        match self {
            Self::Msd => "MSD",
            Self::Mdsd => "MDSD",
            Self::Msd1 => "MSD-I",
            Self::Msd2 => "MSD-II",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "msd" => Ok(Self::Msd),
            "mdsd" => Ok(Self::Mdsd),
            "msd1" | "msd-i" => Ok(Self::Msd1),
            "msd2" | "msd-ii" => Ok(Self::Msd2),
            _ => Err(Error::UnknownSolver(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// Armijo sufficient-decrease constant.
    pub rho: f64,
    /// Armijo backtracking factor.
    pub delta: f64,
    /// Stop when `|gamma(x)| <= gamma_tol`.
    pub gamma_tol: f64,
    pub max_iters: u64,
    /// Initial and floor value of tau for MDSD. MSD-I always starts from 1.
    pub tau0: f64,
    /// Frank-Wolfe duality-gap tolerance for the direction subproblem.
    pub dual_tol: f64,
    pub dual_max_iters: usize,
    pub max_linesearch_steps: u32,
    /// Optional upper bound on the MSD-II modifier. Off by default.
    pub theta_cap: Option<f64>,
    /// Store every iterate in the trace, not just per-iteration scalars.
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(SolverKind::Msd)
    }
}

impl SolverConfig {
    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            rho: 1e-4,
            delta: 0.5,
            gamma_tol: 1e-6,
            max_iters: 1000,
            tau0: 1e-4,
            dual_tol: 1e-8,
            dual_max_iters: 10_000,
            max_linesearch_steps: 60,
            theta_cap: None,
            keep_iterates: false,
        }
    }

    pub fn with_kind(mut self, kind: SolverKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.rho) {
            return Err(Error::InvalidConfig(format!("rho must lie in (0,1), got {}", self.rho)));
        }
        if !open_unit(self.delta) {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        if !(self.gamma_tol > 0.0) {
            return Err(Error::InvalidConfig("gamma_tol must be positive".into()));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(Error::InvalidConfig("tau0 must be positive".into()));
        }
        if !(self.dual_tol > 0.0) {
            return Err(Error::InvalidConfig("dual_tol must be positive".into()));
        }
        if self.max_iters == 0 || self.dual_max_iters == 0 || self.max_linesearch_steps == 0 {
            return Err(Error::InvalidConfig("iteration limits must be positive".into()));
        }
        if let Some(cap) = self.theta_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidConfig("theta_cap must be positive".into()));
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::get_problem;

    #[test]
    fn counted_evaluation_jos1_and_bk1() {
        let jos = get_problem("JOS1", Some(2)).unwrap();
        let mut c = Counters::default();
        assert_eq!(evaluate_counted(&jos, &[0.0, 0.0], &mut c).unwrap(), vec![0.0, 4.0]);
        assert_eq!(c.f_evals, 1);

        let bk1 = get_problem("BK1", None).unwrap();
        assert_eq!(evaluate_counted(&bk1, &[0.0, 0.0], &mut c).unwrap(), vec![0.0, 50.0]);
        assert_eq!(c.f_evals, 2);
        assert_eq!(c.g_evals, 0);
    }

    #[test]
    fn repeated_evaluation_is_bitwise_identical() {
        let p = get_problem("Far1", None).unwrap();
        let mut c = Counters::default();
        let a = evaluate_counted(&p, &[0.3, -0.2], &mut c).unwrap();
        let b = evaluate_counted(&p, &[0.3, -0.2], &mut c).unwrap();
        assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(c.f_evals, 2);
    }

    #[test]
    fn counted_jacobians() {
        let bk1 = get_problem("BK1", None).unwrap();
        let mut c = Counters::default();
        let j = jacobian_counted(&bk1, &[1.0, 1.0], &mut c).unwrap();
        assert_eq!(j, Jacobian::from_rows(&[[2.0, 2.0], [-8.0, -8.0]]));
        assert_eq!(c.g_evals, 1);

        let jos = get_problem("JOS1", Some(2)).unwrap();
        let j = jacobian_counted(&jos, &[1.0, 1.0], &mut c).unwrap();
        assert_eq!(j, Jacobian::from_rows(&[[1.0, 1.0], [-1.0, -1.0]]));
        assert_eq!(c.g_evals, 2);
    }

    #[test]
    fn linear_objective_has_constant_jacobian() {
        // DGO-style affine toy: F(x) = (x1 + 2 x2, -x1)
        struct Affine;
        impl Problem for Affine {
            fn name(&self) -> &str {
                "affine"
            }
            fn num_objectives(&self) -> usize {
                2
            }
            fn dim(&self) -> usize {
                2
            }
            fn lower_bound(&self) -> &[f64] {
                &[-1.0, -1.0]
            }
            fn upper_bound(&self) -> &[f64] {
                &[1.0, 1.0]
            }
            fn is_convex(&self) -> bool {
                true
            }
            fn evaluate(&self, x: &[f64], out: &mut [f64]) {
                out[0] = x[0] + 2.0 * x[1];
                out[1] = -x[0];
            }
            fn jacobian(&self, _x: &[f64], jac: &mut Jacobian) {
                jac.row_mut(0).copy_from_slice(&[1.0, 2.0]);
                jac.row_mut(1).copy_from_slice(&[-1.0, 0.0]);
            }
        }
        let mut c = Counters::default();
        let a = jacobian_counted(&Affine, &[0.1, 0.2], &mut c).unwrap();
        let b = jacobian_counted(&Affine, &[-5.0, 7.0], &mut c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_violation_is_reported() {
        let p = get_problem("MMR1", None).unwrap();
        let mut c = Counters::default();
        assert!(matches!(
            evaluate_counted(&p, &[-0.5, 0.3], &mut c),
            Err(Error::NonFinite { .. })
        ));
        assert_eq!(c.f_evals, 1);
        assert!(matches!(
            evaluate_counted(&p, &[0.5], &mut c),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn solver_names_round_trip() {
        for k in SolverKind::ALL {
            assert_eq!(k.as_str().parse::<SolverKind>().unwrap(), k);
        }
        assert!("newton".parse::<SolverKind>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let mut c = SolverConfig::default();
        c.rho = 1.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.tau0 = 0.0;
        assert!(c.validate().is_err());
    }
}
