//! Multi-objective steepest descent.
//!
//! Solves `min F(x) = (F_1(x), ..., F_m(x))` over `R^n` for Pareto critical
//! points with four descent methods that share one direction subproblem and one
//! Armijo rule:
//!
//! - [`SolverKind::Msd`]: plain steepest descent, `x+ = x + t v(x)`.
//! - [`SolverKind::Mdsd`]: diagonal scaling `v / tau` with a weighted secant `tau`.
//! - [`SolverKind::Msd1`]: diagonal scaling with `tau` fitted to the observed decrease.
//! - [`SolverKind::Msd2`]: secant step modifier `theta = p / q` from one extra Jacobian.
//!
//! ```
//! use mosd::{get_problem, solve, SolverConfig, SolverKind};
//!
//! let bk1 = get_problem("BK1", None).unwrap();
//! let trace = solve(&bk1, &[6.0, 6.0], &SolverConfig::new(SolverKind::Msd));
//! assert!(trace.converged());
//! assert_eq!(trace.final_x, vec![5.0, 5.0]);
//! ```
//!
//! The [`problems`] module holds the bundled test set and start sampler, and
//! [`bench`] runs multi-start campaigns and builds performance profiles.

pub mod bench;
pub mod error;
pub mod linesearch;
pub mod problems;
pub mod solvers;
pub mod subproblem;
pub mod types;

pub use error::{Error, Result};
pub use linesearch::{armijo, Armijo, LineSearchError, LineSearchResult};
pub use problems::{check_jacobian, get_problem, sample_starts, ProblemSpec, SamplerSpec, TestProblem};
pub use solvers::{run_mdsd, run_msd, run_msd1, run_msd2, solve, IterationRecord, RunTrace, Status};
pub use subproblem::{is_critical, psi, solve_dual, SubproblemSolution};
pub use types::{evaluate_counted, jacobian_counted, Counters, Jacobian, Problem, SolverConfig, SolverKind};
