//! Regularized interior point outer loop.
//!
//! Each outer iteration solves a single dual-regularized barrier subproblem
//! to tolerance `eps_k`, recovers `z = mu grad b(x)`, and then adjusts the
//! penalty `rho`, the barrier parameter `mu` and the inner tolerance
//! together, based on progress in constraint violation and complementarity.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::barrier::{compute_z, LogBarrier};
use crate::error::{Error, Result};
use crate::model::{NlpProblem, Vector};
use crate::stationarity::{
    complementarity_measure, feasibility_multiplier, feasibility_residual, is_eps_kkt, kkt_residuals,
    KktResiduals,
};
use crate::subsolver::{SubStatus, SubproblemSpec, Subsolver, DEFAULT_INNER_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegipConfig {
    pub tol: f64,
    pub eps0: f64,
    pub rho0: f64,
    pub mu0: f64,
    pub kappa_rho: f64,
    pub kappa_mu: f64,
    pub kappa_eps: f64,
    pub theta_rho: f64,
    pub theta_mu: f64,
    /// Radius of the safeguarding box for dual estimates (infinity norm).
    pub y_bound: f64,
    pub rho_min: f64,
    pub max_outer: usize,
    /// Seconds.
    pub time_limit: f64,
    pub inner_budget: usize,
}

impl RegipConfig {
    pub fn new(tol: f64) -> Self {
        RegipConfig {
            tol,
            eps0: tol.cbrt(),
            rho0: 1e-6,
            mu0: 0.1,
            kappa_rho: 0.5,
            kappa_mu: 0.5,
            kappa_eps: 0.5,
            theta_rho: 0.5,
            theta_mu: 0.5,
            y_bound: 1e20,
            rho_min: 1e-20,
            max_outer: 500,
            time_limit: 60.0,
            inner_budget: DEFAULT_INNER_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let unit_open = |v: f64| v > 0.0 && v < 1.0;
        let unit_half = |v: f64| (0.0..1.0).contains(&v);
        let checks = [
            ("tol", pos(self.tol)),
            ("eps0", pos(self.eps0)),
            ("rho0", pos(self.rho0)),
            ("mu0", pos(self.mu0)),
            ("kappa_rho", unit_open(self.kappa_rho)),
            ("kappa_mu", unit_open(self.kappa_mu)),
            ("kappa_eps", unit_open(self.kappa_eps)),
            ("theta_rho", unit_half(self.theta_rho)),
            ("theta_mu", unit_half(self.theta_mu)),
            ("y_bound", self.y_bound > 0.0),
            ("rho_min", pos(self.rho_min)),
            ("time_limit", self.time_limit > 0.0),
            ("inner_budget", self.inner_budget > 0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::InvalidParameter(format!("{name} out of range"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxOuter,
    TimeLimit,
    SubsolverFailure,
}

impl SolveStatus {
    pub fn is_success(self) -> bool {
        self == SolveStatus::Optimal
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::MaxOuter => "MaxOuter",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::SubsolverFailure => "SubsolverFailure",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SolveStatus::Optimal,
            SolveStatus::Infeasible,
            SolveStatus::MaxOuter,
            SolveStatus::TimeLimit,
            SolveStatus::SubsolverFailure,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown status `{s}`")))
    }
}

/// One outer iteration as seen after its subproblem returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub rho: f64,
    pub mu: f64,
    pub eps_inner: f64,
    /// `C^k = ||c(x^k)||`
    pub feasibility: f64,
    /// `V^k = ||min(x^k, -z^k)||`
    pub complementarity: f64,
    pub inner_iterations: usize,
    /// `||grad f + J^T y + z||` at the outer iterate.
    pub stationarity: f64,
    /// `||c + rho (yhat - y)||`
    pub dual_residual: f64,
    /// Rounding level of the inner gradient; inner convergence means
    /// `stationarity <= max(eps_inner, stationarity_floor)`.
    pub stationarity_floor: f64,
    pub min_x: f64,
    pub max_z: f64,
    /// `max_i min(x_i, -z_i)`
    pub max_pair_complementarity: f64,
    pub sub_status: SubStatus,
    pub yhat_norm_inf: f64,
    /// The previous multiplier was not finite and `yhat` was reset to zero.
    pub yhat_reset: bool,
    pub retried: bool,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub problem: String,
    pub solver: String,
    pub status: SolveStatus,
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub f: f64,
    pub residuals: KktResiduals,
    /// Residuals of the feasibility problem, filled on `Infeasible`.
    pub feasibility_certificate: Option<KktResiduals>,
    pub history: Vec<IterationRecord>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub wall_seconds: f64,
}

/// Projection onto `{v : ||v||_inf <= bound}`.
pub fn safeguard_dual(y: &Vector, y_bound: f64) -> Vector {
    y.map(|v| v.clamp(-y_bound, y_bound))
}

/// Keeps `rho` at `k = 0` or on satisfactory feasibility progress, otherwise
/// returns `kappa_rho * rho`.
pub fn update_penalty(rho: f64, c_k: f64, c_prev: f64, k: usize, eps: f64, theta_rho: f64, kappa_rho: f64) -> f64 {
    if k == 0 || c_k <= eps.max(theta_rho * c_prev) {
        rho
    } else {
        kappa_rho * rho
    }
}

pub fn update_barrier(mu: f64, v_k: f64, v_prev: f64, k: usize, eps: f64, theta_mu: f64, kappa_mu: f64) -> f64 {
    if k == 0 || v_k <= eps.max(theta_mu * v_prev) {
        mu
    } else {
        kappa_mu * mu
    }
}

pub fn update_tolerance(eps_k: f64, eps: f64, kappa_eps: f64) -> f64 {
    eps.max(kappa_eps * eps_k)
}

pub(crate) fn max_pair(x: &Vector, z: &Vector) -> f64 {
    x.iter().zip(z.iter()).map(|(&a, &b)| a.min(-b)).fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn report_from(
    problem: &NlpProblem,
    solver: &str,
    status: SolveStatus,
    x: Vector,
    y: Vector,
    z: Vector,
    history: Vec<IterationRecord>,
    inner_iterations: usize,
    start: Instant,
) -> SolveReport {
    let residuals = kkt_residuals(problem, &x, &y, &z).unwrap_or(KktResiduals {
        stationarity: f64::INFINITY,
        primal_feasibility: f64::INFINITY,
        complementarity: complementarity_measure(&x, &z),
        bound_violation: 0.0,
        sign_violation: 0.0,
    });
    let feasibility_certificate = (status == SolveStatus::Infeasible)
        .then(|| {
            let zt = feasibility_multiplier(problem, &x).ok()?;
            feasibility_residual(problem, &x, &zt).ok()
        })
        .flatten();
    SolveReport {
        problem: problem.name().to_string(),
        solver: solver.to_string(),
        status,
        f: problem.objective(&x).unwrap_or(f64::NAN),
        residuals,
        feasibility_certificate,
        outer_iterations: history.len(),
        history,
        inner_iterations,
        wall_seconds: start.elapsed().as_secs_f64(),
        x,
        y,
        z,
    }
}

pub(crate) fn deadline_from(start: Instant, seconds: f64) -> Instant {
    start + Duration::from_secs_f64(seconds.min(1e9))
}

/// Runs the regularized interior point method on `problem`.
pub fn regip_solve(problem: &NlpProblem, config: &RegipConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let deadline = deadline_from(start, config.time_limit);
    let barrier = LogBarrier;
    let tol = config.tol;

    let mut x = problem.interior_x0();
    let mut y = problem.y0().clone();
    let mut z = compute_z(&barrier, &x, config.mu0)?;
    let (mut rho, mut mu, mut eps_k) = (config.rho0, config.mu0, config.eps0);
    let (mut c_prev, mut v_prev) = (f64::INFINITY, f64::INFINITY);
    let mut history = Vec::new();
    let mut total_inner = 0usize;
    let mut subsolver = Subsolver::new();

    let finish = |status, x, y, z, history, inner| {
        Ok(report_from(problem, "regip", status, x, y, z, history, inner, start))
    };

    for k in 0..config.max_outer {
        if Instant::now() >= deadline {
            return finish(SolveStatus::TimeLimit, x, y, z, history, total_inner);
        }
        let yhat_reset = y.iter().any(|v| !v.is_finite());
        let yhat = if yhat_reset { Vector::zeros(problem.m()) } else { safeguard_dual(&y, config.y_bound) };

        let run = |subsolver: &mut Subsolver, mu: f64, rho: f64, budget: usize| {
            let spec = SubproblemSpec {
                problem,
                mu,
                rho,
                yhat: yhat.clone(),
                eps_inner: eps_k,
                max_iterations: budget,
                barrier: &barrier,
            };
            subsolver.solve(&spec, &x, Some(deadline))
        };
        let failed = |r: &Result<crate::subsolver::SubResult>| match r {
            Ok(s) => matches!(s.status, SubStatus::MaxIter | SubStatus::LinAlgFailure),
            Err(_) => true,
        };

        let mut retried = false;
        let mut sub = run(&mut subsolver, mu, rho, config.inner_budget);
        if let Ok(s) = &sub {
            total_inner += s.inner_iterations;
        }
        if failed(&sub) {
            retried = true;
            rho *= config.kappa_rho;
            mu *= config.kappa_mu;
            sub = run(&mut subsolver, mu, rho, 2 * config.inner_budget);
            if let Ok(s) = &sub {
                total_inner += s.inner_iterations;
            }
            if failed(&sub) {
                return finish(SolveStatus::SubsolverFailure, x, y, z, history, total_inner);
            }
        }
        let sub = sub?;
        if sub.status == SubStatus::TimeLimit {
            return finish(SolveStatus::TimeLimit, x, y, z, history, total_inner);
        }

        x = sub.x;
        y = sub.y;
        z = compute_z(&barrier, &x, mu)?;
        let residuals = kkt_residuals(problem, &x, &y, &z)?;
        let c_k = residuals.primal_feasibility;
        let v_k = residuals.complementarity;
        history.push(IterationRecord {
            k,
            rho,
            mu,
            eps_inner: eps_k,
            feasibility: c_k,
            complementarity: v_k,
            inner_iterations: sub.inner_iterations,
            stationarity: residuals.stationarity,
            dual_residual: sub.dual_residual,
            stationarity_floor: sub.stationarity_floor,
            min_x: x.min(),
            max_z: z.max(),
            max_pair_complementarity: max_pair(&x, &z),
            sub_status: sub.status,
            yhat_norm_inf: yhat.amax(),
            yhat_reset,
            retried,
        });

        if is_eps_kkt(&residuals, tol) {
            return finish(SolveStatus::Optimal, x, y, z, history, total_inner);
        }
        if eps_k <= tol && c_k > tol && rho <= config.rho_min {
            return finish(SolveStatus::Infeasible, x, y, z, history, total_inner);
        }

        rho = update_penalty(rho, c_k, c_prev, k, tol, config.theta_rho, config.kappa_rho);
        mu = update_barrier(mu, v_k, v_prev, k, tol, config.theta_mu, config.kappa_mu);
        eps_k = update_tolerance(eps_k, tol, config.kappa_eps);
        c_prev = c_k;
        v_prev = v_k;
    }
    finish(SolveStatus::MaxOuter, x, y, z, history, total_inner)
}
