//! Reference solvers for robustness comparisons.
//!
//! [`plain_ip_solve`] is a primal barrier method whose Newton systems have no
//! dual regularization, so a rank-deficient Jacobian leaves the KKT matrix
//! singular. [`bcl_solve`] is a safeguarded bound-constrained augmented
//! Lagrangian method that drives a full barrier continuation inside every
//! outer iteration. Both share the evaluation, barrier and factorization
//! code with [`regip_solve`](crate::outer::regip_solve).

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::barrier::{barrier_eval, compute_z, BarrierFunction, LogBarrier};
use crate::error::{Error, Result};
use crate::kkt::{corrected, solve, SigmaState};
use crate::model::{evaluate_point, NlpProblem, Vector};
use crate::outer::{
    deadline_from, max_pair, report_from, safeguard_dual, update_penalty, update_tolerance, IterationRecord,
    SolveReport, SolveStatus,
};
use crate::stationarity::{is_eps_kkt, kkt_residuals};
use crate::subsolver::{
    fraction_to_boundary, SubStatus, SubproblemSpec, Subsolver, ARMIJO, DEFAULT_INNER_BUDGET, DIVERGENCE_BOUND,
    FRACTION_TO_BOUNDARY, MAX_BACKTRACKS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub tol: f64,
    pub mu0: f64,
    pub mu_shrink: f64,
    pub max_outer: usize,
    pub time_limit: f64,
    pub inner_budget: usize,
    pub rho0: f64,
    pub rho_min: f64,
    pub theta_rho: f64,
    pub kappa_rho: f64,
    pub kappa_eps: f64,
    pub eps0: f64,
    pub y_bound: f64,
}

impl BaselineConfig {
    pub fn new(tol: f64) -> Self {
        BaselineConfig {
            tol,
            mu0: 0.1,
            mu_shrink: 0.2,
            max_outer: 500,
            time_limit: 60.0,
            inner_budget: DEFAULT_INNER_BUDGET,
            rho0: 1e-6,
            rho_min: 1e-20,
            theta_rho: 0.5,
            kappa_rho: 0.5,
            kappa_eps: 0.5,
            eps0: tol.cbrt(),
            y_bound: 1e20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let unit_open = |v: f64| v > 0.0 && v < 1.0;
        let checks = [
            ("tol", pos(self.tol)),
            ("mu0", pos(self.mu0)),
            ("mu_shrink", unit_open(self.mu_shrink)),
            ("time_limit", self.time_limit > 0.0),
            ("inner_budget", self.inner_budget > 0),
            ("rho0", pos(self.rho0)),
            ("rho_min", pos(self.rho_min)),
            ("theta_rho", (0.0..1.0).contains(&self.theta_rho)),
            ("kappa_rho", unit_open(self.kappa_rho)),
            ("kappa_eps", unit_open(self.kappa_eps)),
            ("eps0", pos(self.eps0)),
            ("y_bound", self.y_bound > 0.0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::InvalidParameter(format!("{name} out of range"))),
            None => Ok(()),
        }
    }
}

/// Barrier problems are solved to `max(BARRIER_FACTOR * mu, tol)`.
const BARRIER_FACTOR: f64 = 10.0;
/// Fraction of the predicted decrease the exact-penalty weight must cover.
const PENALTY_MARGIN: f64 = 0.1;

enum Inner {
    Converged,
    Failed,
    TimeLimit,
}

/// Newton iterations on `min f + mu b  s.t.  c = 0` with the unregularized
/// system `[[H + Sigma + sigma I, J^T], [J, 0]]` and an `l1` exact-penalty
/// merit function.
struct PlainIp<'a> {
    problem: &'a NlpProblem,
    barrier: &'a dyn BarrierFunction,
    sigma: SigmaState,
    nu: f64,
}

impl PlainIp<'_> {
    fn merit(&self, x: &Vector, mu: f64) -> Option<f64> {
        if x.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let f = self.problem.objective(x).ok()?;
        let c = self.problem.constraints(x).ok()?;
        let b = barrier_eval(self.barrier, x, mu).ok()?;
        Some(f + b.value + self.nu * c.lp_norm(1))
    }

    fn error(&self, x: &Vector, y: &Vector, mu: f64) -> Result<f64> {
        let g = self.problem.gradient(x)?;
        let j = self.problem.jacobian(x)?;
        let b = barrier_eval(self.barrier, x, mu)?;
        let c = self.problem.constraints(x)?;
        Ok((g + b.gradient + j.transpose() * y).norm().max(c.norm()))
    }

    fn solve_barrier(
        &mut self,
        x: &mut Vector,
        y: &mut Vector,
        mu: f64,
        target: f64,
        budget: usize,
        deadline: Instant,
        iterations: &mut usize,
    ) -> Result<Inner> {
        let (n, m) = (self.problem.n(), self.problem.m());
        for _ in 0..budget {
            if self.error(x, y, mu)? <= target {
                return Ok(Inner::Converged);
            }
            if Instant::now() >= deadline {
                return Ok(Inner::TimeLimit);
            }
            if x.amax() > DIVERGENCE_BOUND {
                return Ok(Inner::Failed);
            }
            let pe = evaluate_point(self.problem, x, y)?;
            let b = barrier_eval(self.barrier, x, mu)?;
            let Ok((fac, sigma)) = corrected(&pe.hess, &b.hessian_diag, &pe.jac, 0.0, &mut self.sigma) else {
                return Ok(Inner::Failed);
            };
            let grad_b = &pe.g + &b.gradient;
            let mut rhs = Vector::zeros(n + m);
            rhs.rows_mut(0, n).copy_from(&(-&grad_b));
            rhs.rows_mut(n, m).copy_from(&(-&pe.c));
            let Ok(sol) = solve(&fac, &rhs) else {
                return Ok(Inner::Failed);
            };
            let dx: Vector = sol.rows(0, n).into_owned();
            let y_new: Vector = sol.rows(n, m).into_owned();

            let c_norm = pe.c.lp_norm(1);
            let curvature = {
                let mut w = &pe.hess * &dx;
                w += b.hessian_diag.component_mul(&dx) + sigma * &dx;
                dx.dot(&w).max(0.0)
            };
            let linear = grad_b.dot(&dx);
            if c_norm > 0.0 {
                let needed = (linear + 0.5 * curvature) / ((1.0 - PENALTY_MARGIN) * c_norm);
                if needed > self.nu {
                    self.nu = needed.max(2.0 * self.nu);
                }
            }
            let slope = linear - self.nu * c_norm;
            let Some(merit0) = self.merit(x, mu) else {
                return Ok(Inner::Failed);
            };
            if !(slope < 0.0) {
                if dx.amax() <= 10.0 * f64::EPSILON * x.amax().max(1.0) {
                    *y = y_new;
                    *iterations += 1;
                    continue;
                }
                return Ok(Inner::Failed);
            }

            let noise = 10.0 * f64::EPSILON * merit0.abs().max(1.0);
            let mut alpha = fraction_to_boundary(x, &dx, FRACTION_TO_BOUNDARY);
            let mut accepted = false;
            for _ in 0..MAX_BACKTRACKS {
                let trial = &*x + alpha * &dx;
                if let Some(merit) = self.merit(&trial, mu) {
                    if merit <= merit0 + ARMIJO * alpha * slope || (merit - merit0).abs() <= noise {
                        *y += alpha * (&y_new - &*y);
                        *x = trial;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                return Ok(Inner::Failed);
            }
            *iterations += 1;
        }
        Ok(if self.error(x, y, mu)? <= target { Inner::Converged } else { Inner::Failed })
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    k: usize,
    rho: f64,
    mu: f64,
    eps_inner: f64,
    problem: &NlpProblem,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    yhat: &Vector,
    inner: usize,
    sub_status: SubStatus,
    dual_residual: f64,
    stationarity_floor: f64,
) -> Result<(IterationRecord, crate::stationarity::KktResiduals)> {
    let r = kkt_residuals(problem, x, y, z)?;
    let rec = IterationRecord {
        k,
        rho,
        mu,
        eps_inner,
        feasibility: r.primal_feasibility,
        complementarity: r.complementarity,
        inner_iterations: inner,
        stationarity: r.stationarity,
        dual_residual,
        stationarity_floor,
        min_x: x.min(),
        max_z: z.max(),
        max_pair_complementarity: max_pair(x, z),
        sub_status,
        yhat_norm_inf: yhat.amax(),
        yhat_reset: false,
        retried: false,
    };
    Ok((rec, r))
}

/// Barrier continuation with unregularized Newton systems.
pub fn plain_ip_solve(problem: &NlpProblem, config: &BaselineConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let deadline = deadline_from(start, config.time_limit);
    let barrier = LogBarrier;
    let tol = config.tol;

    let mut x = problem.interior_x0();
    let mut y = problem.y0().clone();
    let mut mu = config.mu0;
    let mut z = compute_z(&barrier, &x, mu)?;
    let mut history = Vec::new();
    let mut total_inner = 0usize;
    let mut ip = PlainIp { problem, barrier: &barrier, sigma: SigmaState::default(), nu: 1.0 };
    let none = Vector::zeros(0);

    let finish = |status, x, y, z, history, inner| Ok(report_from(problem, "ip", status, x, y, z, history, inner, start));

    for k in 0..config.max_outer {
        let target = (BARRIER_FACTOR * mu).max(tol);
        let mut inner = 0;
        let outcome = ip.solve_barrier(&mut x, &mut y, mu, target, config.inner_budget, deadline, &mut inner)?;
        total_inner += inner;
        match outcome {
            Inner::Converged => {}
            Inner::Failed => return finish(SolveStatus::SubsolverFailure, x, y, z, history, total_inner),
            Inner::TimeLimit => return finish(SolveStatus::TimeLimit, x, y, z, history, total_inner),
        }
        z = compute_z(&barrier, &x, mu)?;
        let (rec, residuals) = record(k, 0.0, mu, target, problem, &x, &y, &z, &none, inner, SubStatus::Converged, 0.0, 0.0)?;
        history.push(rec);
        if is_eps_kkt(&residuals, tol) {
            return finish(SolveStatus::Optimal, x, y, z, history, total_inner);
        }
        mu *= config.mu_shrink;
    }
    finish(SolveStatus::MaxOuter, x, y, z, history, total_inner)
}

/// Smallest barrier parameter tried within one BCL subproblem.
const MU_FLOOR: f64 = 1e-30;

/// Safeguarded augmented Lagrangian method whose bound-constrained
/// subproblems are each solved by a complete barrier continuation.
pub fn bcl_solve(problem: &NlpProblem, config: &BaselineConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let deadline = deadline_from(start, config.time_limit);
    let barrier = LogBarrier;
    let tol = config.tol;

    let mut x = problem.interior_x0();
    let mut y = problem.y0().clone();
    let mut z = compute_z(&barrier, &x, config.mu0)?;
    let (mut rho, mut eps_k) = (config.rho0, config.eps0);
    let mut c_prev = f64::INFINITY;
    let mut history = Vec::new();
    let mut total_inner = 0usize;
    let mut subsolver = Subsolver::new();

    let finish = |status, x, y, z, history, inner| Ok(report_from(problem, "bcl", status, x, y, z, history, inner, start));

    for k in 0..config.max_outer {
        let yhat = if y.iter().any(|v| !v.is_finite()) {
            Vector::zeros(problem.m())
        } else {
            safeguard_dual(&y, config.y_bound)
        };
        let mut mu = config.mu0;
        let mut inner = 0;
        let (mut dual_residual, mut floor);
        loop {
            let spec = SubproblemSpec {
                problem,
                mu,
                rho,
                yhat: yhat.clone(),
                eps_inner: eps_k,
                max_iterations: config.inner_budget,
                barrier: &barrier,
            };
            let sub = subsolver.solve(&spec, &x, Some(deadline))?;
            inner += sub.inner_iterations;
            total_inner += sub.inner_iterations;
            match sub.status {
                SubStatus::Converged => {}
                SubStatus::TimeLimit => return finish(SolveStatus::TimeLimit, x, y, z, history, total_inner),
                SubStatus::MaxIter | SubStatus::LinAlgFailure => {
                    return finish(SolveStatus::SubsolverFailure, x, y, z, history, total_inner)
                }
            }
            x = sub.x;
            y = sub.y;
            dual_residual = sub.dual_residual;
            floor = sub.stationarity_floor;
            z = compute_z(&barrier, &x, mu)?;
            let v = crate::stationarity::complementarity_measure(&x, &z);
            if v <= eps_k {
                break;
            }
            mu *= config.mu_shrink;
            if mu < MU_FLOOR {
                return finish(SolveStatus::SubsolverFailure, x, y, z, history, total_inner);
            }
        }
        let (rec, residuals) =
            record(k, rho, mu, eps_k, problem, &x, &y, &z, &yhat, inner, SubStatus::Converged, dual_residual, floor)?;
        history.push(rec);
        let c_k = residuals.primal_feasibility;
        if is_eps_kkt(&residuals, tol) {
            return finish(SolveStatus::Optimal, x, y, z, history, total_inner);
        }
        if eps_k <= tol && c_k > tol && rho <= config.rho_min {
            return finish(SolveStatus::Infeasible, x, y, z, history, total_inner);
        }
        rho = update_penalty(rho, c_k, c_prev, k, tol, config.theta_rho, config.kappa_rho);
        eps_k = update_tolerance(eps_k, tol, config.kappa_eps);
        c_prev = c_k;
    }
    finish(SolveStatus::MaxOuter, x, y, z, history, total_inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = BaselineConfig::new(1e-6);
        assert!(c.validate().is_ok());
        assert!(BaselineConfig { mu_shrink: 1.0, ..c.clone() }.validate().is_err());
        assert!(BaselineConfig { tol: 0.0, ..c }.validate().is_err());
    }
}
