//! Separable barrier functions `b(x) = sum_i b_i(x_i)` on `(0, inf)^n`.

use crate::error::{Error, Result};
use crate::model::{ensure_interior, Vector};

/// One coordinate of a separable barrier. Implementations must satisfy
/// `b_i(t) -> inf` as `t -> 0+` and `b_i'(t) <= 0`.
pub trait BarrierFunction: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn first_derivative(&self, t: f64) -> f64;
    fn second_derivative(&self, t: f64) -> f64;
}

/// `b_i(t) = -ln t`
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LogBarrier;

impl BarrierFunction for LogBarrier {
    fn value(&self, t: f64) -> f64 {
        -t.ln()
    }

    fn first_derivative(&self, t: f64) -> f64 {
        -1.0 / t
    }

    fn second_derivative(&self, t: f64) -> f64 {
        1.0 / (t * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: Vector,
    pub hessian_diag: Vector,
}

const OVERFLOW: f64 = 1e308;

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("barrier parameter must be positive, got {mu}")))
    }
}

/// `mu * b(x)` with its gradient and (diagonal) Hessian.
pub fn barrier_eval(bf: &dyn BarrierFunction, x: &Vector, mu: f64) -> Result<BarrierEval> {
    check_mu(mu)?;
    ensure_interior(x)?;
    let value = mu * x.iter().map(|&t| bf.value(t)).sum::<f64>();
    if !value.is_finite() || value.abs() > OVERFLOW {
        return Err(Error::EvaluationFailure("barrier"));
    }
    let gradient = x.map(|t| mu * bf.first_derivative(t));
    let hessian_diag = x.map(|t| mu * bf.second_derivative(t));
    if gradient.iter().chain(hessian_diag.iter()).any(|v| !v.is_finite()) {
        return Err(Error::EvaluationFailure("barrier derivatives"));
    }
    Ok(BarrierEval { value, gradient, hessian_diag })
}

/// Bound multiplier estimate `z = mu * grad b(x)`; nonpositive by construction.
pub fn compute_z(bf: &dyn BarrierFunction, x: &Vector, mu: f64) -> Result<Vector> {
    check_mu(mu)?;
    ensure_interior(x)?;
    Ok(x.map(|t| mu * bf.first_derivative(t)))
}
