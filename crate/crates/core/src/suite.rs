//! Registry of small standard-form test problems.
//!
//! Four instances exercise specific behaviour (`QP1`, the LICQ-degenerate
//! `DEGEN1`/`DEGEN2`/`DEGEN3` and the infeasible `INFEAS1`/`INFEAS2`); the
//! rest are smooth problems in the style of the classical Hock-Schittkowski
//! collection, several of them brought to standard form through
//! [`reformulate_to_standard`]. Reference solutions were computed by an
//! independent dense KKT oracle (multi-start Newton over every active set of
//! the bound constraints) and are re-verified by the test suite.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use nalgebra::{dmatrix, dvector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{reformulate_to_standard, GeneralNlp, Matrix, NlpProblem, Vector};
use crate::stationarity::{feasibility_residual, is_eps_kkt, kkt_residuals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Regular,
    Degenerate,
    Infeasible,
    Nonconvex,
}

impl std::str::FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(Tag::Regular),
            "degenerate" => Ok(Tag::Degenerate),
            "infeasible" => Ok(Tag::Infeasible),
            "nonconvex" => Ok(Tag::Nonconvex),
            _ => Err(Error::InvalidParameter(format!("unknown tag `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Analytic,
    Oracle,
    None,
}

/// A KKT point (or, for infeasible instances, a stationary point of the
/// feasibility problem, with `z` its bound multiplier).
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub f: f64,
    pub note: &'static str,
}

#[derive(Debug, Clone)]
pub struct ProblemRecord {
    pub problem: NlpProblem,
    pub tags: BTreeSet<Tag>,
    pub reference: Option<Reference>,
    pub reference_kind: ReferenceKind,
}

impl ProblemRecord {
    pub fn name(&self) -> &str {
        self.problem.name()
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    /// Size key used for bucketing: `max(n, m)`.
    pub fn size(&self) -> usize {
        self.problem.n().max(self.problem.m())
    }
}

fn registry() -> &'static Vec<ProblemRecord> {
    static REGISTRY: OnceLock<Vec<ProblemRecord>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut all: Vec<ProblemRecord> = builders().into_iter().map(|b| b()).collect();
        all.sort_by(|a, b| a.name().cmp(b.name()));
        debug_assert!(all.iter().all(|r| verify_reference(r, REFERENCE_TOL).unwrap_or(false)));
        all
    })
}

/// Tolerance at which stored references are checked.
pub const REFERENCE_TOL: f64 = 1e-10;

/// Checks the stored reference: an `eps`-KKT point, or for infeasible
/// instances a stationary point of `||c||^2 / 2` over `x >= 0` that violates
/// the constraints. Records without a reference pass trivially.
pub fn verify_reference(record: &ProblemRecord, eps: f64) -> Result<bool> {
    let Some(r) = &record.reference else { return Ok(true) };
    let p = &record.problem;
    if (p.objective(&r.x)? - r.f).abs() > eps * r.f.abs().max(1.0) {
        return Ok(false);
    }
    if record.has_tag(Tag::Infeasible) {
        let res = feasibility_residual(p, &r.x, &r.z)?;
        return Ok(is_eps_kkt(&res, eps) && p.constraints(&r.x)?.norm() > eps);
    }
    Ok(is_eps_kkt(&kkt_residuals(p, &r.x, &r.y, &r.z)?, eps))
}

pub fn get_problem(name: &str) -> Result<ProblemRecord> {
    registry()
        .iter()
        .find(|r| r.name() == name)
        .cloned()
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))
}

/// Names in lexicographic order; with a non-empty filter, only problems
/// carrying at least one of the tags.
pub fn list_problems(filter: &BTreeSet<Tag>) -> Vec<String> {
    registry()
        .iter()
        .filter(|r| filter.is_empty() || r.tags.iter().any(|t| filter.contains(t)))
        .map(|r| r.name().to_string())
        .collect()
}

pub fn all_problems() -> Vec<ProblemRecord> {
    registry().clone()
}

type Builder = fn() -> ProblemRecord;

fn builders() -> Vec<Builder> {
    vec![
        qp1, degen1, degen2, degen3, infeas1, infeas2, roseneq, hs6p, hs7p, hs28p, hs48p, bilin, prod3,
        circproj, entropy4, lp1, nwqp, hs71lb, hs35s, hs21b, alsotame, hs40, hs39p, maratos, hs14s, hs42p,
    ]
}

fn tags(list: &[Tag]) -> BTreeSet<Tag> {
    list.iter().copied().collect()
}

fn record(problem: NlpProblem, t: &[Tag], reference: Option<Reference>, kind: ReferenceKind) -> ProblemRecord {
    ProblemRecord { problem, tags: tags(t), reference, reference_kind: kind }
}

fn oracle(x: &[f64], y: &[f64], z: &[f64], f: f64) -> Option<Reference> {
    Some(Reference {
        x: Vector::from_row_slice(x),
        y: Vector::from_row_slice(y),
        z: Vector::from_row_slice(z),
        f,
        note: "dense KKT oracle: multi-start Newton over all bound active sets",
    })
}

fn analytic(x: &[f64], y: &[f64], z: &[f64], f: f64, note: &'static str) -> Option<Reference> {
    Some(Reference {
        x: Vector::from_row_slice(x),
        y: Vector::from_row_slice(y),
        z: Vector::from_row_slice(z),
        f,
        note,
    })
}

const INF: f64 = f64::INFINITY;

#[allow(clippy::too_many_arguments)]
fn general(
    name: &str,
    lower: Vector,
    upper: Vector,
    cons_lower: Vector,
    cons_upper: Vector,
    x0: Vector,
    objective: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
    gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    constraints: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    jacobian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
    hessian: impl Fn(&Vector, &Vector) -> Matrix + Send + Sync + 'static,
) -> NlpProblem {
    let m = cons_lower.len();
    let g = GeneralNlp {
        name: name.to_string(),
        lower,
        upper,
        cons_lower,
        cons_upper,
        x0,
        y0: Vector::zeros(m),
        objective: Arc::new(objective),
        gradient: Arc::new(gradient),
        constraints: Arc::new(constraints),
        jacobian: Arc::new(jacobian),
        hessian: Arc::new(hessian),
    };
    reformulate_to_standard(&g).expect("suite bounds are consistent").0
}

// ---------------------------------------------------------------------------

fn qp1() -> ProblemRecord {
    let p = NlpProblem::builder("QP1", 2, 1)
        .objective(|x| 0.5 * x.norm_squared())
        .gradient(|x| x.clone())
        .constraints(|x| dvector![x[0] + x[1] - 1.0])
        .jacobian(|_| dmatrix![1.0, 1.0])
        .hessian(|_, _| Matrix::identity(2, 2))
        .x0(dvector![1.0, 1.0])
        .build()
        .unwrap();
    let r = analytic(&[0.5, 0.5], &[-0.5], &[0.0, 0.0], 0.25, "x = y* (1,1) with y* = -1/2");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn degen1() -> ProblemRecord {
    let p = NlpProblem::builder("DEGEN1", 1, 1)
        .objective(|x| x[0])
        .gradient(|_| dvector![1.0])
        .constraints(|x| dvector![x[0] * x[0]])
        .jacobian(|x| dmatrix![2.0 * x[0]])
        .hessian(|_, y| dmatrix![2.0 * y[0]])
        .x0(dvector![1.0])
        .build()
        .unwrap();
    let r = analytic(&[0.0], &[0.0], &[-1.0], 0.0, "only feasible point; z = -1 for any y");
    record(p, &[Tag::Degenerate], r, ReferenceKind::Analytic)
}

fn degen2() -> ProblemRecord {
    let p = NlpProblem::builder("DEGEN2", 2, 2)
        .objective(|x| 0.5 * x.norm_squared())
        .gradient(|x| x.clone())
        .constraints(|x| {
            let s = x[0] + x[1] - 1.0;
            dvector![s, s]
        })
        .jacobian(|_| dmatrix![1.0, 1.0; 1.0, 1.0])
        .hessian(|_, _| Matrix::identity(2, 2))
        .x0(dvector![1.0, 1.0])
        .build()
        .unwrap();
    let r = analytic(&[0.5, 0.5], &[-0.25, -0.25], &[0.0, 0.0], 0.25, "QP1 with y1 + y2 = -1/2");
    record(p, &[Tag::Degenerate], r, ReferenceKind::Analytic)
}

fn degen3() -> ProblemRecord {
    let p = NlpProblem::builder("DEGEN3", 2, 1)
        .objective(|x| x[0] + x[1])
        .gradient(|_| dvector![1.0, 1.0])
        .constraints(|x| dvector![(x[0] - x[1]).powi(2)])
        .jacobian(|x| {
            let d = 2.0 * (x[0] - x[1]);
            dmatrix![d, -d]
        })
        .hessian(|_, y| 2.0 * y[0] * dmatrix![1.0, -1.0; -1.0, 1.0])
        .x0(dvector![1.0, 0.5])
        .build()
        .unwrap();
    let r = analytic(&[0.0, 0.0], &[0.0], &[-1.0, -1.0], 0.0, "Jacobian vanishes on the feasible set");
    record(p, &[Tag::Degenerate], r, ReferenceKind::Analytic)
}

fn infeas1() -> ProblemRecord {
    let p = NlpProblem::builder("INFEAS1", 1, 1)
        .objective(|x| x[0])
        .gradient(|_| dvector![1.0])
        .constraints(|x| dvector![x[0] * x[0] + 1.0])
        .jacobian(|x| dmatrix![2.0 * x[0]])
        .hessian(|_, y| dmatrix![2.0 * y[0]])
        .x0(dvector![1.0])
        .build()
        .unwrap();
    let r = analytic(&[0.0], &[0.0], &[0.0], 0.0, "minimizer of (x^2 + 1)^2 / 2 over x >= 0");
    record(p, &[Tag::Infeasible], r, ReferenceKind::Analytic)
}

fn infeas2() -> ProblemRecord {
    let p = NlpProblem::builder("INFEAS2", 2, 1)
        .objective(|x| x[0] + x[1])
        .gradient(|_| dvector![1.0, 1.0])
        .constraints(|x| dvector![x[0] + x[1] + 1.0])
        .jacobian(|_| dmatrix![1.0, 1.0])
        .hessian(|_, _| Matrix::zeros(2, 2))
        .x0(dvector![1.0, 1.0])
        .build()
        .unwrap();
    let r = analytic(&[0.0, 0.0], &[0.0], &[-1.0, -1.0], 0.0, "minimizer of (x1 + x2 + 1)^2 / 2 over x >= 0");
    record(p, &[Tag::Infeasible], r, ReferenceKind::Analytic)
}

fn roseneq() -> ProblemRecord {
    let p = NlpProblem::builder("ROSENEQ", 2, 1)
        .objective(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
        .gradient(|x| {
            let r = x[1] - x[0] * x[0];
            dvector![-2.0 * (1.0 - x[0]) - 400.0 * x[0] * r, 200.0 * r]
        })
        .constraints(|x| dvector![x[0] + x[1] - 2.0])
        .jacobian(|_| dmatrix![1.0, 1.0])
        .hessian(|x, _| {
            dmatrix![2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0], -400.0 * x[0];
                     -400.0 * x[0], 200.0]
        })
        .x0(dvector![0.5, 1.5])
        .build()
        .unwrap();
    let r = analytic(&[1.0, 1.0], &[0.0], &[0.0, 0.0], 0.0, "global minimizer of the Rosenbrock function");
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Analytic)
}

fn hs6p() -> ProblemRecord {
    let p = NlpProblem::builder("HS6P", 2, 1)
        .objective(|x| (1.0 - x[0]).powi(2))
        .gradient(|x| dvector![-2.0 * (1.0 - x[0]), 0.0])
        .constraints(|x| dvector![10.0 * (x[1] - x[0] * x[0])])
        .jacobian(|x| dmatrix![-20.0 * x[0], 10.0])
        .hessian(|_, y| dmatrix![2.0 - 20.0 * y[0], 0.0; 0.0, 0.0])
        .x0(dvector![0.5, 1.0])
        .build()
        .unwrap();
    let r = analytic(&[1.0, 1.0], &[0.0], &[0.0, 0.0], 0.0, "f = 0 on the feasible parabola at x1 = 1");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn hs7p() -> ProblemRecord {
    let p = NlpProblem::builder("HS7P", 2, 1)
        .objective(|x| (1.0 + x[0] * x[0]).ln() - x[1])
        .gradient(|x| dvector![2.0 * x[0] / (1.0 + x[0] * x[0]), -1.0])
        .constraints(|x| dvector![(1.0 + x[0] * x[0]).powi(2) + x[1] * x[1] - 4.0])
        .jacobian(|x| dmatrix![4.0 * x[0] * (1.0 + x[0] * x[0]), 2.0 * x[1]])
        .hessian(|x, y| {
            let q = 1.0 + x[0] * x[0];
            let h11 = (2.0 - 2.0 * x[0] * x[0]) / (q * q) + y[0] * (4.0 + 12.0 * x[0] * x[0]);
            dmatrix![h11, 0.0; 0.0, 2.0 * y[0]]
        })
        .x0(dvector![2.0, 2.0])
        .build()
        .unwrap();
    let s3 = 3f64.sqrt();
    let r = analytic(&[0.0, s3], &[1.0 / (2.0 * s3)], &[0.0, 0.0], -s3, "x1 = 0 with zero bound multiplier");
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Analytic)
}

fn hs28p() -> ProblemRecord {
    let p = NlpProblem::builder("HS28P", 3, 1)
        .objective(|x| (x[0] + x[1]).powi(2) + (x[1] + x[2]).powi(2))
        .gradient(|x| {
            let (a, b) = (x[0] + x[1], x[1] + x[2]);
            dvector![2.0 * a, 2.0 * a + 2.0 * b, 2.0 * b]
        })
        .constraints(|x| dvector![x[0] + 2.0 * x[1] + 3.0 * x[2] - 1.0])
        .jacobian(|_| dmatrix![1.0, 2.0, 3.0])
        .hessian(|_, _| dmatrix![2.0, 2.0, 0.0; 2.0, 4.0, 2.0; 0.0, 2.0, 2.0])
        .x0(dvector![1.0, 1.0, 1.0])
        .build()
        .unwrap();
    let r = oracle(&[0.09999999999999998, 0.0, 0.29999999999999993], &[-0.2], &[0.0, -0.3999999999999998, 0.0], 9.999999999999995e-2);
    record(p, &[Tag::Regular], r, ReferenceKind::Oracle)
}

fn hs48p() -> ProblemRecord {
    let p = NlpProblem::builder("HS48P", 5, 2)
        .objective(|x| (x[0] - 1.0).powi(2) + (x[1] - x[2]).powi(2) + (x[3] - x[4]).powi(2))
        .gradient(|x| {
            let (a, b) = (x[1] - x[2], x[3] - x[4]);
            dvector![2.0 * (x[0] - 1.0), 2.0 * a, -2.0 * a, 2.0 * b, -2.0 * b]
        })
        .constraints(|x| dvector![x.sum() - 5.0, x[2] - 2.0 * (x[3] + x[4]) + 3.0])
        .jacobian(|_| dmatrix![1.0, 1.0, 1.0, 1.0, 1.0; 0.0, 0.0, 1.0, -2.0, -2.0])
        .hessian(|_, _| {
            dmatrix![2.0, 0.0, 0.0, 0.0, 0.0;
                     0.0, 2.0, -2.0, 0.0, 0.0;
                     0.0, -2.0, 2.0, 0.0, 0.0;
                     0.0, 0.0, 0.0, 2.0, -2.0;
                     0.0, 0.0, 0.0, -2.0, 2.0]
        })
        .x0(dvector![3.0, 5.0, 0.5, 2.0, 0.5])
        .build()
        .unwrap();
    let r = analytic(&[1.0; 5], &[0.0, 0.0], &[0.0; 5], 0.0, "f = 0 at the all-ones feasible point");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn bilin() -> ProblemRecord {
    let p = NlpProblem::builder("BILIN", 2, 1)
        .objective(|x| -x[0] * x[1])
        .gradient(|x| dvector![-x[1], -x[0]])
        .constraints(|x| dvector![x[0] + x[1] - 2.0])
        .jacobian(|_| dmatrix![1.0, 1.0])
        .hessian(|_, _| dmatrix![0.0, -1.0; -1.0, 0.0])
        .x0(dvector![0.5, 1.5])
        .build()
        .unwrap();
    let r = analytic(&[1.0, 1.0], &[1.0], &[0.0, 0.0], -1.0, "maximal product on the segment");
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Analytic)
}

fn prod3() -> ProblemRecord {
    let p = NlpProblem::builder("PROD3", 3, 1)
        .objective(|x| -x[0] * x[1] * x[2])
        .gradient(|x| dvector![-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]])
        .constraints(|x| dvector![x.norm_squared() - 3.0])
        .jacobian(|x| Matrix::from_row_slice(1, x.len(), (2.0 * x).as_slice()))
        .hessian(|x, y| {
            let d = 2.0 * y[0];
            dmatrix![d, -x[2], -x[1]; -x[2], d, -x[0]; -x[1], -x[0], d]
        })
        .x0(dvector![0.5, 1.0, 1.5])
        .build()
        .unwrap();
    let r = analytic(&[1.0, 1.0, 1.0], &[0.5], &[0.0; 3], -1.0, "symmetric point on the sphere");
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Analytic)
}

fn circproj() -> ProblemRecord {
    let p = NlpProblem::builder("CIRCPROJ", 2, 1)
        .objective(|x| (x[0] - 2.0).powi(2) + (x[1] - 1.0).powi(2))
        .gradient(|x| dvector![2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)])
        .constraints(|x| dvector![x.norm_squared() - 1.0])
        .jacobian(|x| Matrix::from_row_slice(1, x.len(), (2.0 * x).as_slice()))
        .hessian(|_, y| (2.0 + 2.0 * y[0]) * Matrix::identity(2, 2))
        .x0(dvector![1.0, 1.0])
        .build()
        .unwrap();
    let s5 = 5f64.sqrt();
    let r = analytic(
        &[2.0 / s5, 1.0 / s5],
        &[s5 - 1.0],
        &[0.0, 0.0],
        (s5 - 1.0).powi(2),
        "projection of (2, 1) onto the unit circle",
    );
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn entropy4() -> ProblemRecord {
    let p = NlpProblem::builder("ENTROPY4", 4, 1)
        .objective(|x| x.iter().map(|&v| v * v.ln()).sum())
        .gradient(|x| x.map(|v| v.ln() + 1.0))
        .constraints(|x| dvector![x.sum() - 1.0])
        .jacobian(|_| Matrix::from_element(1, 4, 1.0))
        .hessian(|x, _| Matrix::from_diagonal(&x.map(|v| 1.0 / v)))
        .x0(dvector![0.1, 0.2, 0.3, 0.4])
        .build()
        .unwrap();
    let r = analytic(&[0.25; 4], &[4f64.ln() - 1.0], &[0.0; 4], -(4f64.ln()), "uniform distribution");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn lp1() -> ProblemRecord {
    let p = NlpProblem::builder("LP1", 4, 2)
        .objective(|x| -x[0] - 2.0 * x[1])
        .gradient(|_| dvector![-1.0, -2.0, 0.0, 0.0])
        .constraints(|x| dvector![x[0] + x[1] + x[2] - 4.0, x[0] + 3.0 * x[1] + x[3] - 6.0])
        .jacobian(|_| dmatrix![1.0, 1.0, 1.0, 0.0; 1.0, 3.0, 0.0, 1.0])
        .hessian(|_, _| Matrix::zeros(4, 4))
        .x0(dvector![1.0, 1.0, 1.0, 1.0])
        .build()
        .unwrap();
    let r = analytic(&[3.0, 1.0, 0.0, 0.0], &[0.5, 0.5], &[0.0, 0.0, -0.5, -0.5], -5.0, "optimal vertex");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn nwqp() -> ProblemRecord {
    let p = general(
        "NWQP",
        dvector![0.0, 0.0],
        dvector![INF, INF],
        dvector![-2.0, -6.0, -2.0],
        dvector![INF, INF, INF],
        dvector![2.0, 0.5],
        |x| (x[0] - 1.0).powi(2) + (x[1] - 2.5).powi(2),
        |x| dvector![2.0 * (x[0] - 1.0), 2.0 * (x[1] - 2.5)],
        |x| dvector![x[0] - 2.0 * x[1], -x[0] - 2.0 * x[1], -x[0] + 2.0 * x[1]],
        |_| dmatrix![1.0, -2.0; -1.0, -2.0; -1.0, 2.0],
        |_, _| 2.0 * Matrix::identity(2, 2),
    );
    let r = oracle(&[1.4, 1.7, 0.0, 1.2000000000000002, 4.0], &[-0.8, 0.0, 0.0], &[0.0, 0.0, -0.8, 0.0, 0.0], 0.8);
    record(p, &[Tag::Regular], r, ReferenceKind::Oracle)
}

fn hs71lb() -> ProblemRecord {
    let p = general(
        "HS71LB",
        dvector![1.0, 1.0, 1.0, 1.0],
        dvector![INF, INF, INF, INF],
        dvector![25.0, 40.0],
        dvector![INF, 40.0],
        dvector![1.0, 5.0, 5.0, 1.0],
        |x| x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2],
        |x| {
            let s = x[0] + x[1] + x[2];
            dvector![x[3] * (2.0 * x[0] + x[1] + x[2]), x[0] * x[3], x[0] * x[3] + 1.0, x[0] * s]
        },
        |x| dvector![x[0] * x[1] * x[2] * x[3], x.norm_squared()],
        |x| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            dmatrix![b * c * d, a * c * d, a * b * d, a * b * c;
                     2.0 * a, 2.0 * b, 2.0 * c, 2.0 * d]
        },
        |x, y| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            let t = 2.0 * a + b + c;
            let hf = dmatrix![2.0 * d, d, d, t;
                              d, 0.0, 0.0, a;
                              d, 0.0, 0.0, a;
                              t, a, a, 0.0];
            let hc1 = dmatrix![0.0, c * d, b * d, b * c;
                               c * d, 0.0, a * d, a * c;
                               b * d, a * d, 0.0, a * b;
                               b * c, a * c, a * b, 0.0];
            hf + y[0] * hc1 + 2.0 * y[1] * Matrix::identity(4, 4)
        },
    );
    let r = oracle(
        &[0.0, 3.7429996372644294, 2.8211499841848626, 0.37940829317267083, 0.0],
        &[-0.552293660120726, 0.1614685667705046],
        &[-1.0878712286669678, 0.0, 0.0, 0.0, -0.552293660120726],
        1.7014017289156275e1,
    );
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Oracle)
}

fn hs35s() -> ProblemRecord {
    let p = general(
        "HS35S",
        dvector![0.0, 0.0, 0.0],
        dvector![INF, INF, INF],
        dvector![-INF],
        dvector![3.0],
        dvector![0.5, 0.5, 0.5],
        |x| {
            9.0 - 8.0 * x[0] - 6.0 * x[1] - 4.0 * x[2]
                + 2.0 * x[0] * x[0]
                + 2.0 * x[1] * x[1]
                + x[2] * x[2]
                + 2.0 * x[0] * x[1]
                + 2.0 * x[0] * x[2]
        },
        |x| {
            dvector![
                -8.0 + 4.0 * x[0] + 2.0 * x[1] + 2.0 * x[2],
                -6.0 + 4.0 * x[1] + 2.0 * x[0],
                -4.0 + 2.0 * x[2] + 2.0 * x[0]
            ]
        },
        |x| dvector![x[0] + x[1] + 2.0 * x[2]],
        |_| dmatrix![1.0, 1.0, 2.0],
        |_, _| dmatrix![4.0, 2.0, 2.0; 2.0, 4.0, 0.0; 2.0, 0.0, 2.0],
    );
    let r = analytic(
        &[4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0, 0.0],
        &[2.0 / 9.0],
        &[0.0, 0.0, 0.0, -2.0 / 9.0],
        1.0 / 9.0,
        "active inequality, multiplier 2/9",
    );
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn hs21b() -> ProblemRecord {
    let p = general(
        "HS21B",
        dvector![2.0, -50.0],
        dvector![50.0, 50.0],
        dvector![10.0],
        dvector![INF],
        dvector![3.0, 1.0],
        |x| 0.01 * x[0] * x[0] + x[1] * x[1] - 100.0,
        |x| dvector![0.02 * x[0], 2.0 * x[1]],
        |x| dvector![10.0 * x[0] - x[1]],
        |_| dmatrix![10.0, -1.0],
        |_, _| dmatrix![0.02, 0.0; 0.0, 2.0],
    );
    let r = oracle(&[0.0, 50.0, 48.0, 50.0, 10.0], &[0.0, 0.0, 0.0], &[-0.04, 0.0, 0.0, 0.0, 0.0], -99.96);
    record(p, &[Tag::Regular], r, ReferenceKind::Oracle)
}

fn alsotame() -> ProblemRecord {
    let p = general(
        "ALSOTAME",
        dvector![-2.0, -1.5],
        dvector![2.0, 1.5],
        dvector![0.0],
        dvector![0.0],
        dvector![0.0, 0.0],
        |x| (x[0] - 2.0 * x[1]).exp(),
        |x| {
            let e = (x[0] - 2.0 * x[1]).exp();
            dvector![e, -2.0 * e]
        },
        |x| dvector![(-x[0] + x[1] - 1.0).sin()],
        |x| {
            let c = (-x[0] + x[1] - 1.0).cos();
            dmatrix![-c, c]
        },
        |x, y| {
            let e = (x[0] - 2.0 * x[1]).exp();
            let s = (-x[0] + x[1] - 1.0).sin();
            e * dmatrix![1.0, -2.0; -2.0, 4.0] - y[0] * s * dmatrix![1.0, -1.0; -1.0, 1.0]
        },
    );
    let r = oracle(
        &[2.5, 3.0, 1.5, 0.0],
        &[0.08208499862389873, 0.0, 0.08208499862389877],
        &[0.0, 0.0, 0.0, -0.08208499862389877],
        8.20849986238988e-2,
    );
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Oracle)
}

fn hs40() -> ProblemRecord {
    let p = NlpProblem::builder("HS40", 4, 3)
        .objective(|x| -x[0] * x[1] * x[2] * x[3])
        .gradient(|x| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            dvector![-b * c * d, -a * c * d, -a * b * d, -a * b * c]
        })
        .constraints(|x| {
            dvector![
                x[0].powi(3) + x[1] * x[1] - 1.0,
                x[0] * x[0] * x[3] - x[2],
                x[3] * x[3] - x[1]
            ]
        })
        .jacobian(|x| {
            dmatrix![3.0 * x[0] * x[0], 2.0 * x[1], 0.0, 0.0;
                     2.0 * x[0] * x[3], 0.0, -1.0, x[0] * x[0];
                     0.0, -1.0, 0.0, 2.0 * x[3]]
        })
        .hessian(|x, y| {
            let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
            let hf = -dmatrix![0.0, c * d, b * d, b * c;
                               c * d, 0.0, a * d, a * c;
                               b * d, a * d, 0.0, a * b;
                               b * c, a * c, a * b, 0.0];
            let mut h = hf;
            h[(0, 0)] += y[0] * 6.0 * a;
            h[(1, 1)] += y[0] * 2.0;
            h[(0, 0)] += y[1] * 2.0 * d;
            h[(0, 3)] += y[1] * 2.0 * a;
            h[(3, 0)] += y[1] * 2.0 * a;
            h[(3, 3)] += y[2] * 2.0;
            h
        })
        .x0(dvector![0.8, 0.8, 0.8, 0.8])
        .build()
        .unwrap();
    let r = oracle(
        &[0.7937005259840997, 0.7071067811865475, 0.5297315471796477, 0.8408964152537145],
        &[0.49999999999999994, -0.4719371563408467, 0.3535533905932737],
        &[0.0; 4],
        -0.25,
    );
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Oracle)
}

fn hs39p() -> ProblemRecord {
    let p = NlpProblem::builder("HS39P", 4, 2)
        .objective(|x| -x[0])
        .gradient(|_| dvector![-1.0, 0.0, 0.0, 0.0])
        .constraints(|x| {
            dvector![
                x[1] - x[0].powi(3) - x[2] * x[2],
                x[0] * x[0] - x[1] - x[3] * x[3]
            ]
        })
        .jacobian(|x| {
            dmatrix![-3.0 * x[0] * x[0], 1.0, -2.0 * x[2], 0.0;
                     2.0 * x[0], -1.0, 0.0, -2.0 * x[3]]
        })
        .hessian(|x, y| {
            Matrix::from_diagonal(&dvector![-6.0 * x[0] * y[0] + 2.0 * y[1], 0.0, -2.0 * y[0], -2.0 * y[1]])
        })
        .x0(dvector![2.0, 2.0, 2.0, 2.0])
        .build()
        .unwrap();
    let r = analytic(&[1.0, 1.0, 0.0, 0.0], &[-1.0, -1.0], &[0.0; 4], -1.0, "weakly active bounds on x3, x4");
    record(p, &[Tag::Regular, Tag::Nonconvex], r, ReferenceKind::Analytic)
}

fn maratos() -> ProblemRecord {
    let p = NlpProblem::builder("MARATOS", 2, 1)
        .objective(|x| {
            let (a, b) = (x[0] - 1.0, x[1] - 1.0);
            2.0 * (a * a + b * b - 1.0) - a
        })
        .gradient(|x| dvector![4.0 * (x[0] - 1.0) - 1.0, 4.0 * (x[1] - 1.0)])
        .constraints(|x| dvector![(x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2) - 1.0])
        .jacobian(|x| dmatrix![2.0 * (x[0] - 1.0), 2.0 * (x[1] - 1.0)])
        .hessian(|_, y| (4.0 + 2.0 * y[0]) * Matrix::identity(2, 2))
        .x0(dvector![1.7, 1.6])
        .build()
        .unwrap();
    let r = analytic(&[2.0, 1.0], &[-1.5], &[0.0, 0.0], -1.0, "shifted Maratos example");
    record(p, &[Tag::Regular], r, ReferenceKind::Analytic)
}

fn hs14s() -> ProblemRecord {
    let p = general(
        "HS14S",
        dvector![0.0, 0.0],
        dvector![INF, INF],
        dvector![-1.0, -1.0],
        dvector![-1.0, INF],
        dvector![2.0, 2.0],
        |x| (x[0] - 2.0).powi(2) + (x[1] - 1.0).powi(2),
        |x| dvector![2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)],
        |x| dvector![x[0] - 2.0 * x[1], -0.25 * x[0] * x[0] - x[1] * x[1]],
        |x| dmatrix![1.0, -2.0; -0.5 * x[0], -2.0 * x[1]],
        |_, y| dmatrix![2.0 - 0.5 * y[1], 0.0; 0.0, 2.0 - 2.0 * y[1]],
    );
    let r = oracle(
        &[0.8228756555322954, 0.9114378277661477, 0.0],
        &[1.5944911182523067, -1.846591439606113],
        &[0.0, 0.0, -1.846591439606113],
        1.393464980689302,
    );
    record(p, &[Tag::Regular], r, ReferenceKind::Oracle)
}

fn hs42p() -> ProblemRecord {
    let p = NlpProblem::builder("HS42P", 4, 2)
        .objective(|x| {
            (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2) + (x[2] - 3.0).powi(2) + (x[3] - 4.0).powi(2)
        })
        .gradient(|x| dvector![2.0 * (x[0] - 1.0), 2.0 * (x[1] - 2.0), 2.0 * (x[2] - 3.0), 2.0 * (x[3] - 4.0)])
        .constraints(|x| dvector![x[0] - 2.0, x[2] * x[2] + x[3] * x[3] - 2.0])
        .jacobian(|x| dmatrix![1.0, 0.0, 0.0, 0.0; 0.0, 0.0, 2.0 * x[2], 2.0 * x[3]])
        .hessian(|_, y| Matrix::from_diagonal(&dvector![2.0, 2.0, 2.0 + 2.0 * y[1], 2.0 + 2.0 * y[1]]))
        .x0(dvector![1.0, 1.0, 1.0, 1.0])
        .build()
        .unwrap();
    let r = oracle(
        &[2.0, 2.0, 0.848528137423857, 1.131370849898476],
        &[-2.0, 2.5355339059327373],
        &[0.0; 4],
        1.3857864376269049e1,
    );
    record(p, &[Tag::Regular], r, ReferenceKind::Oracle)
}
