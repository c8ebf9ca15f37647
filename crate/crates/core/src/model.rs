//! Problem abstractions.
//!
//! [`NlpProblem`] is the standard form every solver in this crate works on:
//!
//! ```txt
//!     minimize   f(x)
//!     subject to c(x) = 0,  x >= 0
//! ```
//!
//! [`GeneralNlp`] carries variable bounds `l <= x <= u` and constraint bounds
//! `cl <= c(x) <= cu`; [`reformulate_to_standard`] turns it into an
//! [`NlpProblem`] by shifting, reflecting and splitting variables and adding
//! slacks.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

type ScalarFn = dyn Fn(&Vector) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&Vector) -> Vector + Send + Sync;
type MatrixFn = dyn Fn(&Vector) -> Matrix + Send + Sync;
type HessianFn = dyn Fn(&Vector, &Vector) -> Matrix + Send + Sync;

/// Entries below this are lifted before any barrier evaluation.
pub const INTERIOR_CLAMP: f64 = 1e-2;

/// Standard-form problem: `min f(x)` s.t. `c(x) = 0`, `x >= 0`.
///
/// Cheap to clone; the evaluation maps are shared.
#[derive(Clone)]
pub struct NlpProblem {
    name: String,
    n: usize,
    m: usize,
    x0: Vector,
    y0: Vector,
    objective: Arc<ScalarFn>,
    gradient: Arc<VectorFn>,
    constraints: Arc<VectorFn>,
    jacobian: Arc<MatrixFn>,
    hessian: Arc<HessianFn>,
}

impl fmt::Debug for NlpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NlpProblem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

pub struct NlpBuilder {
    name: String,
    n: usize,
    m: usize,
    x0: Option<Vector>,
    y0: Option<Vector>,
    objective: Option<Arc<ScalarFn>>,
    gradient: Option<Arc<VectorFn>>,
    constraints: Option<Arc<VectorFn>>,
    jacobian: Option<Arc<MatrixFn>>,
    hessian: Option<Arc<HessianFn>>,
}

impl NlpBuilder {
    pub fn objective(mut self, f: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.objective = Some(Arc::new(f));
        self
    }

    pub fn gradient(mut self, f: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(f));
        self
    }

    pub fn constraints(mut self, f: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.constraints = Some(Arc::new(f));
        self
    }

    pub fn jacobian(mut self, f: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(f));
        self
    }

    /// Hessian of `f(x) + <y, c(x)>` with respect to `x`.
    pub fn hessian(
        mut self,
        f: impl Fn(&Vector, &Vector) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.hessian = Some(Arc::new(f));
        self
    }

    pub fn x0(mut self, x0: Vector) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn y0(mut self, y0: Vector) -> Self {
        self.y0 = Some(y0);
        self
    }

    pub fn build(self) -> Result<NlpProblem> {
        let NlpBuilder { name, n, m, .. } = self;
        if n == 0 {
            return Err(Error::DimensionMismatch(format!("{name}: n must be >= 1")));
        }
        let missing = |what: &str| Error::InvalidParameter(format!("{name}: missing {what}"));
        let objective = self.objective.ok_or_else(|| missing("objective"))?;
        let gradient = self.gradient.ok_or_else(|| missing("gradient"))?;
        let hessian = self.hessian.ok_or_else(|| missing("hessian"))?;
        let (constraints, jacobian): (Arc<VectorFn>, Arc<MatrixFn>) =
            match (self.constraints, self.jacobian) {
                (Some(c), Some(j)) => (c, j),
                (None, None) if m == 0 => (
                    Arc::new(|_: &Vector| Vector::zeros(0)),
                    Arc::new(move |_: &Vector| Matrix::zeros(0, n)),
                ),
                _ => return Err(missing("constraints/jacobian pair")),
            };
        let x0 = self.x0.unwrap_or_else(|| Vector::from_element(n, 1.0));
        let y0 = self.y0.unwrap_or_else(|| Vector::zeros(m));
        if x0.len() != n || y0.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{name}: x0 has {} entries (n = {n}), y0 has {} (m = {m})",
                x0.len(),
                y0.len()
            )));
        }
        Ok(NlpProblem {
            name,
            n,
            m,
            x0,
            y0,
            objective,
            gradient,
            constraints,
            jacobian,
            hessian,
        })
    }
}

impl NlpProblem {
    pub fn builder(name: impl Into<String>, n: usize, m: usize) -> NlpBuilder {
        NlpBuilder {
            name: name.into(),
            n,
            m,
            x0: None,
            y0: None,
            objective: None,
            gradient: None,
            constraints: None,
            jacobian: None,
            hessian: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn y0(&self) -> &Vector {
        &self.y0
    }

    /// The initial point with every entry lifted to at least [`INTERIOR_CLAMP`].
    pub fn interior_x0(&self) -> Vector {
        self.x0.map(|v| if v.is_nan() { INTERIOR_CLAMP } else { v.max(INTERIOR_CLAMP) })
    }

    fn check_x(&self, x: &Vector) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}: x has {} entries, expected {}",
                self.name,
                x.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_y(&self, y: &Vector) -> Result<()> {
        if y.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "{}: y has {} entries, expected {}",
                self.name,
                y.len(),
                self.m
            )));
        }
        Ok(())
    }

    pub fn objective(&self, x: &Vector) -> Result<f64> {
        self.check_x(x)?;
        let v = (self.objective)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluationFailure("objective"))
        }
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_x(x)?;
        let g = (self.gradient)(x);
        finite_vector(g, self.n, "gradient")
    }

    pub fn constraints(&self, x: &Vector) -> Result<Vector> {
        self.check_x(x)?;
        let c = (self.constraints)(x);
        finite_vector(c, self.m, "constraints")
    }

    pub fn jacobian(&self, x: &Vector) -> Result<Matrix> {
        self.check_x(x)?;
        let j = (self.jacobian)(x);
        finite_matrix(j, self.m, self.n, "jacobian")
    }

    pub fn hessian(&self, x: &Vector, y: &Vector) -> Result<Matrix> {
        self.check_x(x)?;
        self.check_y(y)?;
        let h = (self.hessian)(x, y);
        finite_matrix(h, self.n, self.n, "hessian")
    }
}

fn finite_vector(v: Vector, len: usize, what: &'static str) -> Result<Vector> {
    if v.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "{what} returned {} entries, expected {len}",
            v.len()
        )));
    }
    if v.iter().all(|e| e.is_finite()) {
        Ok(v)
    } else {
        Err(Error::EvaluationFailure(what))
    }
}

fn finite_matrix(a: Matrix, rows: usize, cols: usize, what: &'static str) -> Result<Matrix> {
    if a.nrows() != rows || a.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "{what} returned {}x{}, expected {rows}x{cols}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().all(|e| e.is_finite()) {
        Ok(a)
    } else {
        Err(Error::EvaluationFailure(what))
    }
}

/// Returns `DomainViolation` for the first entry of `x` that is not strictly positive.
pub fn ensure_interior(x: &Vector) -> Result<()> {
    match x.iter().position(|&v| !(v > 0.0)) {
        Some(index) => Err(Error::DomainViolation { index, value: x[index] }),
        None => Ok(()),
    }
}

/// Everything the Newton systems need at `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub x: Vector,
    pub y: Vector,
    pub f: f64,
    pub g: Vector,
    pub c: Vector,
    pub jac: Matrix,
    pub hess: Matrix,
}

pub fn evaluate_point(problem: &NlpProblem, x: &Vector, y: &Vector) -> Result<PointEval> {
    problem.check_x(x)?;
    problem.check_y(y)?;
    ensure_interior(x)?;
    Ok(PointEval {
        x: x.clone(),
        y: y.clone(),
        f: problem.objective(x)?,
        g: problem.gradient(x)?,
        c: problem.constraints(x)?,
        jac: problem.jacobian(x)?,
        hess: problem.hessian(x, y)?,
    })
}

// ---------------------------------------------------------------------------
// Derivative checking

/// Maximal relative errors `|fd - exact| / max(1, |exact|)` per derivative block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub gradient: f64,
    pub jacobian: f64,
    pub hessian: f64,
}

impl DerivativeReport {
    pub fn max_error(&self) -> f64 {
        self.gradient.max(self.jacobian).max(self.hessian)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_error() <= tol
    }
}

/// Multipliers used when checking the Lagrangian Hessian: alternating signs,
/// distinct magnitudes, so no constraint curvature cancels out.
pub fn probe_multipliers(m: usize) -> Vector {
    Vector::from_fn(m, |j, _| {
        let mag = 1.0 + j as f64 / (m.max(1) as f64);
        if j % 2 == 0 {
            mag
        } else {
            -mag
        }
    })
}

/// Compares the supplied derivatives against central finite differences with
/// per-coordinate step `step * max(1, |x_i|)`.
pub fn check_derivatives(problem: &NlpProblem, x: &Vector, step: f64) -> Result<DerivativeReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    problem.check_x(x)?;
    ensure_interior(x)?;
    let n = problem.n();
    let y = probe_multipliers(problem.m());

    let g = problem.gradient(x)?;
    let jac = problem.jacobian(x)?;
    let hess = problem.hessian(x, &y)?;
    let lag_grad = |p: &Vector| -> Result<Vector> {
        Ok(problem.gradient(p)? + problem.jacobian(p)?.transpose() * &y)
    };

    let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);
    let mut report = DerivativeReport { gradient: 0.0, jacobian: 0.0, hessian: 0.0 };
    for i in 0..n {
        let h = step * x[i].abs().max(1.0);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        ensure_interior(&xm)?;
        let width = xp[i] - xm[i];

        let fd = (problem.objective(&xp)? - problem.objective(&xm)?) / width;
        report.gradient = report.gradient.max(rel(fd, g[i]));

        let cd = (problem.constraints(&xp)? - problem.constraints(&xm)?) / width;
        for j in 0..problem.m() {
            report.jacobian = report.jacobian.max(rel(cd[j], jac[(j, i)]));
        }

        let hd = (lag_grad(&xp)? - lag_grad(&xm)?) / width;
        for r in 0..n {
            report.hessian = report.hessian.max(rel(hd[r], hess[(r, i)]));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// General form and reformulation

/// `min f(x)` s.t. `l <= x <= u`, `cl <= c(x) <= cu`; infinite bounds allowed.
#[derive(Clone)]
pub struct GeneralNlp {
    pub name: String,
    pub lower: Vector,
    pub upper: Vector,
    pub cons_lower: Vector,
    pub cons_upper: Vector,
    pub x0: Vector,
    pub y0: Vector,
    pub objective: Arc<ScalarFn>,
    pub gradient: Arc<VectorFn>,
    pub constraints: Arc<VectorFn>,
    pub jacobian: Arc<MatrixFn>,
    pub hessian: Arc<HessianFn>,
}

impl fmt::Debug for GeneralNlp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralNlp")
            .field("name", &self.name)
            .field("lower", &self.lower.as_slice())
            .field("upper", &self.upper.as_slice())
            .field("cons_lower", &self.cons_lower.as_slice())
            .field("cons_upper", &self.cons_upper.as_slice())
            .finish_non_exhaustive()
    }
}

impl GeneralNlp {
    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn m(&self) -> usize {
        self.cons_lower.len()
    }

    /// Feasibility in the original space, up to `tol`.
    pub fn is_feasible(&self, x: &Vector, tol: f64) -> bool {
        let c = (self.constraints)(x);
        let within = |v: f64, lo: f64, hi: f64| v >= lo - tol && v <= hi + tol;
        (0..self.n()).all(|i| within(x[i], self.lower[i], self.upper[i]))
            && (0..self.m()).all(|j| within(c[j], self.cons_lower[j], self.cons_upper[j]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarMap {
    /// `x = lower + x'`
    Shift { col: usize, lower: f64 },
    /// `x = upper - x'`
    Reflect { col: usize, upper: f64 },
    /// `x = p - q`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowMap {
    /// `c_j(x) - rhs = 0`
    Equality { row: usize, rhs: f64 },
    /// `c_j(x) - rhs + sign * s = 0`
    Slacked { row: usize, rhs: f64, slack: usize, sign: f64 },
    /// `c_j(x) - lower - s1 = 0` and `s1 + s2 - (upper - lower) = 0`
    Range { row: usize, lower: f64, upper: f64, s1: usize, s2: usize },
}

/// Affine map from standard-form variables back to the original space, plus
/// the inverse direction for feasible points.
#[derive(Debug, Clone)]
pub struct Reformulation {
    vars: Vec<VarMap>,
    /// `(col, slack, width)`: `x'_col + s - width = 0` for doubly bounded variables.
    upper_rows: Vec<(usize, usize, f64)>,
    rows: Vec<Option<RowMap>>,
    n_std: usize,
    m_std: usize,
    /// `x = a x' + b`
    a: Matrix,
    b: Vector,
}

impl Reformulation {
    pub fn n_standard(&self) -> usize {
        self.n_std
    }

    pub fn m_standard(&self) -> usize {
        self.m_std
    }

    pub fn recover(&self, x_std: &Vector) -> Vector {
        &self.a * x_std + &self.b
    }

    /// Standard-form point whose recovered image is `x` (slacks from `c(x)`).
    pub fn lift(&self, general: &GeneralNlp, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n_std);
        for (i, map) in self.vars.iter().enumerate() {
            match *map {
                VarMap::Shift { col, lower } => out[col] = x[i] - lower,
                VarMap::Reflect { col, upper } => out[col] = upper - x[i],
                VarMap::Split { pos, neg } => {
                    out[pos] = x[i].max(0.0);
                    out[neg] = (-x[i]).max(0.0);
                }
            }
        }
        for &(col, slack, width) in &self.upper_rows {
            out[slack] = width - out[col];
        }
        let c = (general.constraints)(x);
        for row in self.rows.iter().flatten() {
            match *row {
                RowMap::Equality { .. } => {}
                RowMap::Slacked { row, rhs, slack, sign } => out[slack] = -(c[row] - rhs) / sign,
                RowMap::Range { row, lower, upper, s1, s2 } => {
                    out[s1] = c[row] - lower;
                    out[s2] = upper - c[row];
                }
            }
        }
        out
    }
}

/// Rewrites `g` in standard form.
///
/// Finite lower bounds become shifts, variables with only an upper bound are
/// reflected, free variables are split, and inequality rows get slacks. A
/// doubly bounded variable is shifted and gets one extra equality row with a
/// slack for the upper bound.
pub fn reformulate_to_standard(g: &GeneralNlp) -> Result<(NlpProblem, Reformulation)> {
    let n = g.n();
    let m = g.m();
    if g.upper.len() != n || g.x0.len() != n || g.cons_upper.len() != m || g.y0.len() != m {
        return Err(Error::DimensionMismatch(format!("{}: bound vectors disagree", g.name)));
    }
    for i in 0..n {
        if g.lower[i].is_nan() || g.upper[i].is_nan() || g.lower[i] > g.upper[i] {
            return Err(Error::InconsistentBounds(format!(
                "variable {i}: [{}, {}]",
                g.lower[i], g.upper[i]
            )));
        }
    }
    for j in 0..m {
        if g.cons_lower[j].is_nan() || g.cons_upper[j].is_nan() || g.cons_lower[j] > g.cons_upper[j]
        {
            return Err(Error::InconsistentBounds(format!(
                "constraint {j}: [{}, {}]",
                g.cons_lower[j], g.cons_upper[j]
            )));
        }
    }

    let mut next_col = 0usize;
    let mut take_col = || {
        next_col += 1;
        next_col - 1
    };
    let mut vars = Vec::with_capacity(n);
    let mut doubly = Vec::new();
    for i in 0..n {
        let (lo, hi) = (g.lower[i], g.upper[i]);
        let map = if lo.is_finite() {
            let col = take_col();
            if hi.is_finite() {
                doubly.push((col, hi - lo));
            }
            VarMap::Shift { col, lower: lo }
        } else if hi.is_finite() {
            VarMap::Reflect { col: take_col(), upper: hi }
        } else {
            let pos = take_col();
            VarMap::Split { pos, neg: take_col() }
        };
        vars.push(map);
    }
    let mut upper_rows = Vec::with_capacity(doubly.len());
    for (col, width) in doubly {
        upper_rows.push((col, take_col(), width));
    }
    let mut rows = Vec::with_capacity(m);
    for j in 0..m {
        let (lo, hi) = (g.cons_lower[j], g.cons_upper[j]);
        let row = if lo == hi {
            Some(RowMap::Equality { row: j, rhs: lo })
        } else if lo.is_finite() && hi.is_finite() {
            let s1 = take_col();
            Some(RowMap::Range { row: j, lower: lo, upper: hi, s1, s2: take_col() })
        } else if lo.is_finite() {
            Some(RowMap::Slacked { row: j, rhs: lo, slack: take_col(), sign: -1.0 })
        } else if hi.is_finite() {
            Some(RowMap::Slacked { row: j, rhs: hi, slack: take_col(), sign: 1.0 })
        } else {
            None
        };
        rows.push(row);
    }
    let n_std = next_col;

    let mut a = Matrix::zeros(n, n_std);
    let mut b = Vector::zeros(n);
    for (i, map) in vars.iter().enumerate() {
        match *map {
            VarMap::Shift { col, lower } => {
                a[(i, col)] = 1.0;
                b[i] = lower;
            }
            VarMap::Reflect { col, upper } => {
                a[(i, col)] = -1.0;
                b[i] = upper;
            }
            VarMap::Split { pos, neg } => {
                a[(i, pos)] = 1.0;
                a[(i, neg)] = -1.0;
            }
        }
    }

    // Standard constraints: C(x') = P c(a x' + b) + S x' + r.
    let active: Vec<RowMap> = rows.iter().flatten().copied().collect();
    let m_nonlin = active.len();
    let n_range = active.iter().filter(|r| matches!(r, RowMap::Range { .. })).count();
    let m_std = m_nonlin + upper_rows.len() + n_range;
    let mut select = Matrix::zeros(m_std, m);
    let mut lin = Matrix::zeros(m_std, n_std);
    let mut offset = Vector::zeros(m_std);
    let mut extra = m_nonlin;
    for (k, row) in active.iter().enumerate() {
        match *row {
            RowMap::Equality { row, rhs } => {
                select[(k, row)] = 1.0;
                offset[k] = -rhs;
            }
            RowMap::Slacked { row, rhs, slack, sign } => {
                select[(k, row)] = 1.0;
                offset[k] = -rhs;
                lin[(k, slack)] = sign;
            }
            RowMap::Range { row, lower, upper, s1, s2 } => {
                select[(k, row)] = 1.0;
                offset[k] = -lower;
                lin[(k, s1)] = -1.0;
                lin[(extra, s1)] = 1.0;
                lin[(extra, s2)] = 1.0;
                offset[extra] = -(upper - lower);
                extra += 1;
            }
        }
    }
    for &(col, slack, width) in &upper_rows {
        lin[(extra, col)] = 1.0;
        lin[(extra, slack)] = 1.0;
        offset[extra] = -width;
        extra += 1;
    }
    debug_assert_eq!(extra, m_std);

    let reform = Reformulation { vars, upper_rows, rows, n_std, m_std, a, b };

    let x0_std = reform.lift(g, &g.x0);
    let y0_std = &select * &g.y0;

    let gen = Arc::new(g.clone());
    let (a, b) = (Arc::new(reform.a.clone()), Arc::new(reform.b.clone()));
    let (select, lin, offset) = (Arc::new(select), Arc::new(lin), Arc::new(offset));

    let orig = {
        let (a, b) = (a.clone(), b.clone());
        move |xs: &Vector| &*a * xs + &*b
    };
    let orig = Arc::new(orig);

    let problem = NlpProblem::builder(g.name.clone(), n_std, m_std)
        .objective({
            let (gen, orig) = (gen.clone(), orig.clone());
            move |xs| (gen.objective)(&orig(xs))
        })
        .gradient({
            let (gen, orig, a) = (gen.clone(), orig.clone(), a.clone());
            move |xs| a.transpose() * (gen.gradient)(&orig(xs))
        })
        .constraints({
            let (gen, orig) = (gen.clone(), orig.clone());
            let (select, lin, offset) = (select.clone(), lin.clone(), offset.clone());
            move |xs| &*select * (gen.constraints)(&orig(xs)) + &*lin * xs + &*offset
        })
        .jacobian({
            let (gen, orig, a) = (gen.clone(), orig.clone(), a.clone());
            let (select, lin) = (select.clone(), lin.clone());
            move |xs| &*select * (gen.jacobian)(&orig(xs)) * &*a + &*lin
        })
        .hessian({
            let (gen, orig, a) = (gen.clone(), orig.clone(), a.clone());
            let select = select.clone();
            move |xs, ys| {
                let y_orig = select.transpose() * ys;
                a.transpose() * (gen.hessian)(&orig(xs), &y_orig) * &*a
            }
        })
        .x0(x0_std)
        .y0(y0_std)
        .build()?;
    Ok((problem, reform))
}
