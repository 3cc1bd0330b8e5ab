//! Run-level invariants over the whole registry, campaign fairness, and the
//! direction subproblem against a brute-force oracle.

mod common;

use common::{brute_force_dual, Rng};
use mosd::bench::{run_campaign, CampaignSpec};
use mosd::problems::{sample_start, REGISTRY};
use mosd::{get_problem, psi, solve, solve_dual, Jacobian, Problem, SamplerSpec, SolverConfig, SolverKind, Status};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = SolverKind> {
    prop::sample::select(SolverKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn run_traces_are_consistent(
        idx in 0..REGISTRY.len(),
        start in 0usize..1000,
        kind in kind_strategy(),
        max_iters in 1u64..150,
    ) {
        let p = get_problem(REGISTRY[idx].name, None).unwrap();
        let mut cfg = SolverConfig::new(kind);
        cfg.max_iters = max_iters;
        let x0 = sample_start(&p, 99, start);
        let tr = solve(&p, &x0, &cfg);
        let c = &tr.counters;

        prop_assert_eq!(tr.records.len() as u64, c.iterations + 1);
        prop_assert!(c.iterations <= max_iters);
        prop_assert!(c.f_evals >= c.iterations);
        prop_assert!(c.g_evals >= c.iterations);
        if tr.status == Status::Converged {
            prop_assert!(tr.final_gamma.abs() <= cfg.gamma_tol);
        }
        if tr.status == Status::IterationCap {
            prop_assert_eq!(c.iterations, max_iters);
        }
        let lambda_sum: f64 = tr.final_lambda.iter().sum();
        prop_assert!(tr.final_lambda.iter().all(|&l| l >= 0.0));
        prop_assert!((lambda_sum - 1.0).abs() <= 1e-9);

        for (k, r) in tr.records.iter().enumerate() {
            prop_assert_eq!(r.k, k as u64);
            // gamma = gap - |v|^2 / 2, so an inexact dual can leave it just above 0
            prop_assert!(r.gamma <= cfg.dual_tol);
            if let Some(t) = r.t {
                prop_assert!(t > 0.0 && t <= 1.0);
                // tau and theta stay positive
                prop_assert!(r.modifier > 0.0 && r.modifier.is_finite());
            }
        }
        // MSD-II has no componentwise descent guarantee
        if kind != SolverKind::Msd2 {
            let fs: Vec<&Vec<f64>> = tr.records.iter().filter_map(|r| r.f.as_ref()).collect();
            for w in fs.windows(2) {
                prop_assert!(w[0].iter().zip(w[1]).all(|(a, b)| b <= a));
            }
        }
    }
}

#[test]
fn every_solver_starts_from_the_same_points() {
    let spec = CampaignSpec {
        problems: ["BK1", "MOP3", "FDS:5"].iter().map(|s| s.parse().unwrap()).collect(),
        solvers: SolverKind::ALL
            .iter()
            .map(|&k| {
                let mut cfg = SolverConfig::new(k);
                cfg.keep_iterates = true;
                cfg.max_iters = 5;
                cfg
            })
            .collect(),
        starts: SamplerSpec { seed: 17, count: 7 },
        parallelism: 3,
    };
    let records = run_campaign(&spec).unwrap();
    assert_eq!(records.len(), 3 * 4 * 7);
    for r in &records {
        let twin = records
            .iter()
            .find(|o| o.problem == r.problem && o.start_index == r.start_index && o.solver() == SolverKind::Msd)
            .unwrap();
        let x0 = |rec: &mosd::bench::RunRecord| rec.trace.records[0].x.clone().unwrap();
        assert_eq!(x0(r).iter().map(|v| v.to_bits()).collect::<Vec<_>>(), x0(twin).iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

fn check_against_oracle(rows: &[Vec<f64>]) -> f64 {
    let jac = Jacobian::from_rows(rows);
    let sol = solve_dual(&jac, 1e-12, 100_000);
    let (oracle, _) = brute_force_dual(rows);
    let scale = 1.0f64.max(oracle);
    assert!(
        sol.dual_value() <= oracle + 1e-7 * scale,
        "solver {} above oracle {oracle} for {rows:?}",
        sol.dual_value()
    );
    // the oracle is itself a feasible point, so the solver can only be lower by roundoff
    assert!(oracle - sol.dual_value() <= 1e-7 * scale, "oracle {oracle} below solver {}", sol.dual_value());
    assert!((sol.psi_at_v - psi(&jac, &sol.v)).abs() <= 1e-12 * scale);
    (sol.dual_value() - oracle).abs()
}

#[test]
fn direction_matches_brute_force_on_random_instances() {
    let mut rng = Rng::new(5);
    for _ in 0..60 {
        let m = 2 + rng.below(3);
        let n = 1 + rng.below(5);
        check_against_oracle(&rng.matrix(m, n, -4.0, 4.0));
    }
}

#[test]
fn direction_matches_brute_force_on_a_thin_face() {
    // the optimum sits on a nearly degenerate edge, where plain away steps stall
    let rows = vec![vec![1.0, 1e-3], vec![1.0, -1e-3], vec![-1e-4, 1.0]];
    check_against_oracle(&rows);
    let rows = vec![vec![3.0, 2.0], vec![3.0 + 1e-6, 2.0 - 1e-6], vec![2.5, 3.0]];
    check_against_oracle(&rows);
}

#[test]
fn critical_point_gives_zero_direction() {
    // opposite gradients: 0 lies in their convex hull
    let p = get_problem("JOS1", Some(3)).unwrap();
    let x = vec![1.0; 3];
    let sol = solve_dual(&p.gradients(&x), 1e-10, 10_000);
    assert!(sol.v_norm() <= 1e-12);
    assert_eq!(sol.gamma, 0.0);
}
