//! Approximate minimization of the regularized barrier function
//!
//! ```txt
//!     phi(x) = f(x) + 1/(2 rho) ||c(x) + rho yhat||^2 + mu b(x)
//! ```
//!
//! by damped Newton steps on the condensed system. The multiplier is kept
//! at `y(x) = yhat + c(x) / rho`, so the dual-regularized constraint
//! `c + rho (yhat - y) = 0` holds at every iterate and the second block of
//! the right-hand side is zero.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::barrier::{barrier_eval, BarrierFunction};
use crate::error::{Error, Result};
use crate::kkt::{corrected, solve, Inertia, SigmaState};
use crate::model::{ensure_interior, evaluate_point, NlpProblem, Vector};

pub const FRACTION_TO_BOUNDARY: f64 = 0.995;
pub const ARMIJO: f64 = 1e-4;
pub const MAX_BACKTRACKS: usize = 50;
pub const DEFAULT_INNER_BUDGET: usize = 200;
/// Iterates beyond this magnitude are treated as diverging.
pub const DIVERGENCE_BOUND: f64 = 1e20;

pub struct SubproblemSpec<'a> {
    pub problem: &'a NlpProblem,
    pub mu: f64,
    pub rho: f64,
    pub yhat: Vector,
    pub eps_inner: f64,
    pub max_iterations: usize,
    pub barrier: &'a dyn BarrierFunction,
}

impl SubproblemSpec<'_> {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.mu) || !ok(self.rho) || !ok(self.eps_inner) {
            return Err(Error::InvalidParameter(format!(
                "mu = {}, rho = {}, eps_inner = {} must be positive",
                self.mu, self.rho, self.eps_inner
            )));
        }
        if self.yhat.len() != self.problem.m() {
            return Err(Error::DimensionMismatch(format!(
                "yhat has {} entries, expected {}",
                self.yhat.len(),
                self.problem.m()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubStatus {
    Converged,
    MaxIter,
    LinAlgFailure,
    TimeLimit,
}

/// One accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub merit_before: f64,
    pub merit_after: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub inertia: Inertia,
    /// Accepted because the merit change was below rounding noise while the
    /// gradient norm still decreased.
    pub noise_accept: bool,
}

#[derive(Debug, Clone)]
pub struct SubResult {
    pub x: Vector,
    pub lambda: Vector,
    pub y: Vector,
    pub inner_iterations: usize,
    pub status: SubStatus,
    /// `||grad f + mu grad b + J^T y||` at the returned point.
    pub final_stationarity: f64,
    /// `||c + rho (yhat - y)||` at the returned point.
    pub dual_residual: f64,
    /// Rounding level of the gradient at the returned point. Convergence is
    /// declared once `final_stationarity <= max(eps_inner, stationarity_floor)`.
    pub stationarity_floor: f64,
    pub steps: Vec<StepRecord>,
}

/// `y(x) = yhat + c / rho`
pub fn multiplier_estimate(c: &Vector, yhat: &Vector, rho: f64) -> Vector {
    yhat + c / rho
}

pub fn merit_value(spec: &SubproblemSpec<'_>, x: &Vector) -> Result<f64> {
    ensure_interior(x)?;
    let f = spec.problem.objective(x)?;
    let c = spec.problem.constraints(x)?;
    let b = barrier_eval(spec.barrier, x, spec.mu)?;
    let shifted = c + spec.rho * &spec.yhat;
    Ok(f + shifted.norm_squared() / (2.0 * spec.rho) + b.value)
}

/// Largest step in `(0, 1]` keeping `x + alpha dx >= (1 - tau) x`.
pub fn fraction_to_boundary(x: &Vector, dx: &Vector, tau: f64) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&xi, &d)| -tau * xi / d)
        .fold(1.0, f64::min)
}

struct Local {
    y: Vector,
    grad: Vector,
    stationarity: f64,
    floor: f64,
}

/// Rounding slack in summing the gradient terms. With `|y|` near `1 / rho`
/// it can exceed any reasonable inner tolerance.
const FLOOR_FACTOR: f64 = 10.0 * f64::EPSILON;

/// Damped Newton solver for one regularized barrier subproblem. Keeps the
/// primal regularization state between calls.
#[derive(Debug, Clone, Default)]
pub struct Subsolver {
    pub sigma: SigmaState,
}

impl Subsolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn local(&self, spec: &SubproblemSpec<'_>, x: &Vector) -> Result<Local> {
        let c = spec.problem.constraints(x)?;
        let y = multiplier_estimate(&c, &spec.yhat, spec.rho);
        let g = spec.problem.gradient(x)?;
        let jac = spec.problem.jacobian(x)?;
        let b = barrier_eval(spec.barrier, x, spec.mu)?;
        let magnitude = g.abs() + b.gradient.abs() + jac.abs().transpose() * y.abs();
        let grad = g + b.gradient + jac.transpose() * &y;
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationFailure("merit gradient"));
        }
        let stationarity = grad.norm();
        let floor = FLOOR_FACTOR * magnitude.norm();
        Ok(Local { y, grad, stationarity, floor })
    }

    pub fn solve(
        &mut self,
        spec: &SubproblemSpec<'_>,
        x_start: &Vector,
        deadline: Option<Instant>,
    ) -> Result<SubResult> {
        spec.validate()?;
        ensure_interior(x_start)?;
        let problem = spec.problem;
        let n = problem.n();
        let mut x = x_start.clone();
        let mut steps = Vec::new();

        let finish = |x: Vector, local: Option<Local>, status: SubStatus, steps: Vec<StepRecord>| {
            let (y, stat, floor) = match local {
                Some(l) => (l.y, l.stationarity, l.floor),
                None => match problem.constraints(&x) {
                    Ok(c) => (multiplier_estimate(&c, &spec.yhat, spec.rho), f64::INFINITY, 0.0),
                    Err(_) => (spec.yhat.clone(), f64::INFINITY, 0.0),
                },
            };
            let dual_residual = match problem.constraints(&x) {
                Ok(c) => (c + spec.rho * (&spec.yhat - &y)).norm(),
                Err(_) => f64::INFINITY,
            };
            SubResult {
                lambda: y.clone(),
                y,
                inner_iterations: steps.len(),
                status,
                final_stationarity: stat,
                dual_residual,
                stationarity_floor: floor,
                x,
                steps,
            }
        };

        let mut current = match self.local(spec, &x) {
            Ok(l) => l,
            Err(_) => return Ok(finish(x, None, SubStatus::LinAlgFailure, steps)),
        };
        loop {
            if current.stationarity <= spec.eps_inner.max(current.floor) {
                return Ok(finish(x, Some(current), SubStatus::Converged, steps));
            }
            if steps.len() >= spec.max_iterations || x.amax() > DIVERGENCE_BOUND {
                return Ok(finish(x, Some(current), SubStatus::MaxIter, steps));
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Ok(finish(x, Some(current), SubStatus::TimeLimit, steps));
            }

            let pe = evaluate_point(problem, &x, &current.y)?;
            let b = barrier_eval(spec.barrier, &x, spec.mu)?;
            let (fac, sigma) = match corrected(&pe.hess, &b.hessian_diag, &pe.jac, spec.rho, &mut self.sigma) {
                Ok(v) => v,
                Err(_) => return Ok(finish(x, Some(current), SubStatus::LinAlgFailure, steps)),
            };
            let mut rhs = Vector::zeros(n + problem.m());
            rhs.rows_mut(0, n).copy_from(&(-&current.grad));
            let sol = match solve(&fac, &rhs) {
                Ok(s) => s,
                Err(_) => return Ok(finish(x, Some(current), SubStatus::LinAlgFailure, steps)),
            };
            let dx: Vector = sol.rows(0, n).into_owned();
            let slope = current.grad.dot(&dx);
            if !(slope < 0.0) {
                return Ok(finish(x, Some(current), SubStatus::LinAlgFailure, steps));
            }

            let merit0 = merit_value(spec, &x)?;
            let noise = 10.0 * f64::EPSILON * merit0.abs().max(1.0);
            let mut alpha = fraction_to_boundary(&x, &dx, FRACTION_TO_BOUNDARY);
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial = &x + alpha * &dx;
                if trial.iter().all(|&v| v > 0.0) {
                    if let Ok(merit) = merit_value(spec, &trial) {
                        if merit < merit0 && merit <= merit0 + ARMIJO * alpha * slope {
                            accepted = Some((trial, merit, false));
                            break;
                        }
                        if (merit - merit0).abs() <= noise {
                            if let Ok(l) = self.local(spec, &trial) {
                                if l.stationarity < current.stationarity {
                                    accepted = Some((trial, merit, true));
                                    break;
                                }
                            }
                        }
                    }
                }
                alpha *= 0.5;
            }
            let Some((trial, merit, noise_accept)) = accepted else {
                return Ok(finish(x, Some(current), SubStatus::MaxIter, steps));
            };
            steps.push(StepRecord {
                merit_before: merit0,
                merit_after: merit,
                alpha,
                sigma,
                inertia: fac.inertia(),
                noise_accept,
            });
            x = trial;
            current = match self.local(spec, &x) {
                Ok(l) => l,
                Err(_) => return Ok(finish(x, None, SubStatus::LinAlgFailure, steps)),
            };
        }
    }
}

/// Solves one subproblem with a fresh primal-regularization state.
pub fn solve_subproblem(spec: &SubproblemSpec<'_>, x_start: &Vector) -> Result<SubResult> {
    Subsolver::new().solve(spec, x_start, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::LogBarrier;
    use crate::model::Matrix;
    use nalgebra::{dmatrix, dvector};

    fn qp1() -> NlpProblem {
        NlpProblem::builder("QP1", 2, 1)
            .objective(|x| 0.5 * x.norm_squared())
            .gradient(|x| x.clone())
            .constraints(|x| dvector![x[0] + x[1] - 1.0])
            .jacobian(|_| dmatrix![1.0, 1.0])
            .hessian(|_, _| Matrix::identity(2, 2))
            .build()
            .unwrap()
    }

    fn spec<'a>(p: &'a NlpProblem, mu: f64, rho: f64, yhat: Vector, eps: f64) -> SubproblemSpec<'a> {
        SubproblemSpec { problem: p, mu, rho, yhat, eps_inner: eps, max_iterations: 200, barrier: &LogBarrier }
    }

    #[test]
    fn multiplier_examples() {
        assert_eq!(multiplier_estimate(&dvector![0.1], &dvector![0.3], 0.5), dvector![0.5]);
        assert_eq!(multiplier_estimate(&dvector![0.0], &dvector![0.7], 0.5), dvector![0.7]);
        assert_eq!(multiplier_estimate(&dvector![1e-6], &dvector![0.0], 1e-6), dvector![1.0]);
    }

    #[test]
    fn merit_examples() {
        let p = qp1();
        let s = spec(&p, 1e-16, 1.0, dvector![0.0], 1e-8);
        let v = merit_value(&s, &dvector![0.5, 0.5]).unwrap();
        assert!((v - (0.25 + 2.0 * 1e-16 * 2f64.ln())).abs() < 1e-17);

        let lin = NlpProblem::builder("LIN", 1, 1)
            .objective(|_| 0.0)
            .gradient(|_| dvector![0.0])
            .constraints(|x| dvector![x[0] - 1.0])
            .jacobian(|_| dmatrix![1.0])
            .hessian(|_, _| dmatrix![0.0])
            .build()
            .unwrap();
        let s = spec(&lin, 1.0, 1.0, dvector![2.0], 1e-8);
        assert_eq!(merit_value(&s, &dvector![1.0]).unwrap(), 2.0);
        assert!(matches!(merit_value(&s, &dvector![0.0]), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn fraction_to_boundary_examples() {
        assert_eq!(fraction_to_boundary(&dvector![1.0, 1.0], &dvector![-2.0, 0.5], 0.995), 0.4975);
        assert_eq!(fraction_to_boundary(&dvector![1.0, 2.0], &dvector![0.0, 3.0], 0.995), 1.0);
        let a = fraction_to_boundary(&dvector![1e-8], &dvector![-1.0], 0.995);
        assert!((a - 9.95e-9).abs() < 1e-22);
    }

    #[test]
    fn unbounded_barrier_exhausts_budget() {
        let p = NlpProblem::builder("FREE", 1, 0)
            .objective(|_| 0.0)
            .gradient(|_| dvector![0.0])
            .hessian(|_, _| dmatrix![0.0])
            .build()
            .unwrap();
        let s = spec(&p, 1.0, 1.0, Vector::zeros(0), 1e-30);
        let r = solve_subproblem(&s, &dvector![1.0]).unwrap();
        assert_eq!(r.status, SubStatus::MaxIter);
    }

    #[test]
    fn rejects_exterior_start() {
        let p = qp1();
        let s = spec(&p, 0.1, 0.1, dvector![0.0], 1e-8);
        assert!(solve_subproblem(&s, &dvector![1.0, 0.0]).is_err());
    }
}
