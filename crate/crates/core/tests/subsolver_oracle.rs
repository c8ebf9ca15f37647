mod common;

use nalgebra::dvector;
use regip_core::barrier::{compute_z, LogBarrier};
use regip_core::kkt::Inertia;
use regip_core::stationarity::kkt_residuals;
use regip_core::subsolver::{merit_value, solve_subproblem, SubResult, SubStatus, SubproblemSpec};
use regip_core::suite::{all_problems, get_problem};
use regip_core::Vector;

fn spec<'a>(p: &'a regip_core::NlpProblem, mu: f64, rho: f64, eps: f64) -> SubproblemSpec<'a> {
    SubproblemSpec {
        problem: p,
        mu,
        rho,
        yhat: Vector::zeros(p.m()),
        eps_inner: eps,
        max_iterations: 200,
        barrier: &LogBarrier,
    }
}

fn check_invariants(s: &SubproblemSpec<'_>, r: &SubResult) {
    let (n, m) = (s.problem.n(), s.problem.m());
    assert!(r.x.iter().all(|&v| v > 0.0));
    for step in &r.steps {
        assert_eq!(step.inertia, Inertia::new(n, m, 0));
        assert!(step.noise_accept || step.merit_after < step.merit_before);
    }
    if r.status == SubStatus::Converged {
        assert!(r.final_stationarity <= s.eps_inner.max(r.stationarity_floor));
        assert_eq!(r.lambda, r.y);
        let z = compute_z(s.barrier, &r.x, s.mu).unwrap();
        let res = kkt_residuals(s.problem, &r.x, &r.y, &z).unwrap();
        assert!(res.stationarity <= s.eps_inner.max(r.stationarity_floor) * (1.0 + 1e-9) + 1e-15);
        assert!(r.dual_residual <= 2.0 * s.eps_inner);
    }
}

#[test]
fn qp1_against_one_dimensional_minimizer() {
    // By symmetry the minimizer has x1 = x2 = t with
    // phi'(t) / 2 = t + (2t - 1) / rho - mu / t = 0.
    let r = get_problem("QP1").unwrap();
    let (mu, rho) = (1e-8, 1e-8);
    let s = spec(&r.problem, mu, rho, 1e-8);
    let res = solve_subproblem(&s, &dvector![1.0, 1.0]).unwrap();
    assert_eq!(res.status, SubStatus::Converged);
    check_invariants(&s, &res);
    let t = common::bisect(|t| t + (2.0 * t - 1.0) / rho - mu / t, 1e-3, 1.0);
    assert!((&res.x - dvector![t, t]).amax() <= 1e-10);
    assert!((&res.x - dvector![0.5, 0.5]).norm() <= 1e-4);
}

#[test]
fn degen1_against_one_dimensional_minimizer() {
    // phi(x) = x + x^4 / (2 rho) - mu ln x, so phi'(x) = 1 + 2 x^3 / rho - mu / x.
    let r = get_problem("DEGEN1").unwrap();
    let (mu, rho) = (1e-6, 1e-6);
    let s = spec(&r.problem, mu, rho, 1e-8);
    let res = solve_subproblem(&s, &dvector![1.0]).unwrap();
    assert_eq!(res.status, SubStatus::Converged);
    check_invariants(&s, &res);
    let x = common::bisect(|x| 1.0 + 2.0 * x.powi(3) / rho - mu / x, 1e-12, 1.0);
    let curvature = mu / (x * x);
    assert!((res.x[0] - x).abs() <= 2.0 * s.eps_inner / curvature);
    let probe = |v: f64| merit_value(&s, &dvector![v]).unwrap();
    assert!(probe(res.x[0]) <= probe(x * 1.01) && probe(res.x[0]) <= probe(x * 0.99));
}

#[test]
fn unbounded_barrier_exhausts_budget() {
    let p = regip_core::NlpProblem::builder("LOGONLY", 1, 0)
        .objective(|_| 0.0)
        .gradient(|_| dvector![0.0])
        .hessian(|_, _| regip_core::Matrix::zeros(1, 1))
        .build()
        .unwrap();
    let s = spec(&p, 1.0, 1.0, 1e-30);
    let res = solve_subproblem(&s, &dvector![1.0]).unwrap();
    assert_eq!(res.status, SubStatus::MaxIter);
    assert!(res.x[0] > 1.0);
}

#[test]
fn invariants_hold_on_every_suite_problem() {
    for r in all_problems() {
        for (mu, rho) in [(0.1, 1e-2), (1e-3, 1e-6)] {
            let s = spec(&r.problem, mu, rho, 1e-6);
            let res = solve_subproblem(&s, &r.problem.interior_x0()).unwrap();
            check_invariants(&s, &res);
        }
    }
}
