//! Approximate KKT residuals for the standard-form problem and for the
//! feasibility problem `min_{x>=0} 0.5 ||c(x)||^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NlpProblem, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `||grad f + J^T y + z||_2`
    pub stationarity: f64,
    /// `||c(x)||_2`
    pub primal_feasibility: f64,
    /// `||min(x, -z)||_2`, elementwise min
    pub complementarity: f64,
    /// `max(0, -min_i x_i)`
    pub bound_violation: f64,
    /// `max(0, max_i z_i)`
    pub sign_violation: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal_feasibility)
            .max(self.complementarity)
            .max(self.bound_violation)
            .max(self.sign_violation)
    }
}

/// Euclidean norm of the elementwise `min(x, -z)`.
pub fn complementarity_measure(x: &Vector, z: &Vector) -> f64 {
    x.iter()
        .zip(z.iter())
        .map(|(&xi, &zi)| xi.min(-zi).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn sign_fields(x: &Vector, z: &Vector) -> (f64, f64) {
    let bound = x.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    let sign = z.iter().fold(0.0f64, |acc, &v| acc.max(v));
    (bound, sign)
}

fn check_dims(problem: &NlpProblem, x: &Vector, z: &Vector) -> Result<()> {
    if x.len() != problem.n() || z.len() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} and z has {} entries, expected {}",
            x.len(),
            z.len(),
            problem.n()
        )));
    }
    Ok(())
}

pub fn kkt_residuals(problem: &NlpProblem, x: &Vector, y: &Vector, z: &Vector) -> Result<KktResiduals> {
    check_dims(problem, x, z)?;
    if y.len() != problem.m() {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries, expected {}",
            y.len(),
            problem.m()
        )));
    }
    let g = problem.gradient(x)?;
    let c = problem.constraints(x)?;
    let jac = problem.jacobian(x)?;
    let stat = g + jac.transpose() * y + z;
    let (bound_violation, sign_violation) = sign_fields(x, z);
    Ok(KktResiduals {
        stationarity: stat.norm(),
        primal_feasibility: c.norm(),
        complementarity: complementarity_measure(x, z),
        bound_violation,
        sign_violation,
    })
}

pub fn is_eps_kkt(r: &KktResiduals, eps: f64) -> bool {
    r.stationarity <= eps
        && r.primal_feasibility <= eps
        && r.complementarity <= eps
        && r.bound_violation <= eps
        && r.sign_violation <= eps
}

/// Residuals for the feasibility problem; `primal_feasibility` is reported as 0.
pub fn feasibility_residual(problem: &NlpProblem, x: &Vector, ztilde: &Vector) -> Result<KktResiduals> {
    check_dims(problem, x, ztilde)?;
    let c = problem.constraints(x)?;
    let jac = problem.jacobian(x)?;
    let stat = jac.transpose() * c + ztilde;
    let (bound_violation, sign_violation) = sign_fields(x, ztilde);
    Ok(KktResiduals {
        stationarity: stat.norm(),
        primal_feasibility: 0.0,
        complementarity: complementarity_measure(x, ztilde),
        bound_violation,
        sign_violation,
    })
}

/// The nonpositive bound multiplier closest to making `x` stationary for the
/// feasibility problem: `-max(J^T c, 0)`.
pub fn feasibility_multiplier(problem: &NlpProblem, x: &Vector) -> Result<Vector> {
    let c = problem.constraints(x)?;
    let jac = problem.jacobian(x)?;
    Ok((jac.transpose() * c).map(|g| -g.max(0.0)))
}
