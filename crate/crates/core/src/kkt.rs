//! Condensed regularized KKT systems
//!
//! ```txt
//!     [ H + Sigma + sigma I    J^T    ] [dx]   [r_x]
//!     [ J                    -rho I   ] [dy] = [r_y]
//! ```
//!
//! factorized by a dense symmetric-indefinite LDL^T with Bunch-Kaufman
//! pivoting. The inertia is read off the 1x1 and 2x2 blocks of `D`.

use crate::error::{Error, Result};
use crate::model::{Matrix, Vector};

/// Pivots at or below `PIVOT_TOL * scale` count as zero, where `scale` is
/// the magnitude of everything that was summed into that diagonal entry.
const PIVOT_TOL: f64 = 1e-14;
const REFINE_STEPS: usize = 3;
const REFINE_TOL: f64 = 1e-8;

pub const SIGMA_MAX: f64 = 1e20;
pub const SIGMA_FIRST: f64 = 1e-4;
pub const SIGMA_MIN: f64 = 1e-20;
const SIGMA_GROW: f64 = 10.0;
const SIGMA_SHRINK: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Inertia { positive, negative, zero }
    }
}

#[derive(Debug, Clone)]
pub struct KktSystem {
    pub w: Matrix,
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub sigma: f64,
    pub sigma_diag: Vector,
    /// Per-row magnitude of the terms summed into each diagonal entry.
    diag_scale: Vector,
}

impl KktSystem {
    pub fn dim(&self) -> usize {
        self.n + self.m
    }
}

pub fn assemble_kkt(h: &Matrix, sigma_diag: &Vector, jac: &Matrix, rho: f64, sigma: f64) -> Result<KktSystem> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    assemble(h, sigma_diag, jac, rho, sigma)
}

/// Like [`assemble_kkt`] but also accepts `rho = 0` (no dual regularization).
pub(crate) fn assemble(h: &Matrix, sigma_diag: &Vector, jac: &Matrix, rho: f64, sigma: f64) -> Result<KktSystem> {
    let n = h.nrows();
    let m = jac.nrows();
    if h.ncols() != n || sigma_diag.len() != n || jac.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{}, Sigma has {}, J is {}x{}",
            h.nrows(),
            h.ncols(),
            sigma_diag.len(),
            jac.nrows(),
            jac.ncols()
        )));
    }
    if !(sigma >= 0.0) || !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma}, rho = {rho}")));
    }
    let dim = n + m;
    let mut w = Matrix::zeros(dim, dim);
    let mut diag_scale = Vector::zeros(dim);
    for i in 0..n {
        for k in 0..n {
            w[(i, k)] = h[(i, k)];
        }
        w[(i, i)] += sigma_diag[i] + sigma;
        diag_scale[i] = h[(i, i)].abs() + sigma_diag[i].abs() + sigma;
    }
    for r in 0..m {
        for k in 0..n {
            w[(n + r, k)] = jac[(r, k)];
            w[(k, n + r)] = jac[(r, k)];
        }
        w[(n + r, n + r)] = -rho;
        diag_scale[n + r] = rho;
    }
    for i in 0..dim {
        for k in 0..dim {
            if !w[(i, k)].is_finite() {
                return Err(Error::NonFiniteEntry(i, k));
            }
        }
    }
    Ok(KktSystem { w, n, m, rho, sigma, sigma_diag: sigma_diag.clone(), diag_scale })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pivot {
    One(f64),
    /// Symmetric block `[[a, b], [b, c]]`.
    Two(f64, f64, f64),
}

/// `P W P^T = L D L^T`; row `i` of the permuted system is row `perm[i]` of `W`.
#[derive(Debug, Clone)]
pub struct Factorization {
    w: Matrix,
    perm: Vec<usize>,
    l: Matrix,
    pivots: Vec<Pivot>,
    inertia: Inertia,
}

pub fn factorize(sys: &KktSystem) -> Result<Factorization> {
    factorize_scaled(&sys.w, &sys.diag_scale)
}

/// Factorizes a bare symmetric matrix.
pub fn factorize_matrix(w: &Matrix) -> Result<Factorization> {
    let scale = Vector::from_fn(w.nrows(), |i, _| w[(i, i)].abs());
    factorize_scaled(w, &scale)
}

fn factorize_scaled(w: &Matrix, diag_scale: &Vector) -> Result<Factorization> {
    let dim = w.nrows();
    if w.ncols() != dim {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{}", dim, w.ncols())));
    }
    for i in 0..dim {
        for k in 0..dim {
            if !w[(i, k)].is_finite() {
                return Err(Error::NonFiniteEntry(i, k));
            }
        }
    }

    let alpha = (1.0 + 17f64.sqrt()) / 8.0;
    let mut a = w.clone();
    let mut scale = diag_scale.clone();
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut l = Matrix::identity(dim, dim);
    let mut pivots = Vec::with_capacity(dim);
    let mut inertia = Inertia::default();

    let swap = |a: &mut Matrix, l: &mut Matrix, scale: &mut Vector, perm: &mut Vec<usize>, k: usize, p: usize, q: usize| {
        if p == q {
            return;
        }
        a.swap_rows(p, q);
        a.swap_columns(p, q);
        for c in 0..k {
            let t = l[(p, c)];
            l[(p, c)] = l[(q, c)];
            l[(q, c)] = t;
        }
        scale.swap_rows(p, q);
        perm.swap(p, q);
    };

    let mut k = 0;
    while k < dim {
        let absakk = a[(k, k)].abs();
        let (imax, colmax) = ((k + 1)..dim)
            .map(|i| (i, a[(i, k)].abs()))
            .fold((k, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let tol = PIVOT_TOL * scale[k];
        if absakk <= tol && colmax <= tol {
            return Err(Error::SingularMatrix { column: k, pivot: a[(k, k)] });
        }

        let two_by_two = if absakk >= alpha * colmax {
            false
        } else {
            let rowmax = (k..dim)
                .filter(|&j| j != imax)
                .map(|j| a[(imax, j)].abs())
                .fold(0.0, f64::max);
            if absakk * rowmax >= alpha * colmax * colmax {
                false
            } else if a[(imax, imax)].abs() >= alpha * rowmax {
                swap(&mut a, &mut l, &mut scale, &mut perm, k, k, imax);
                false
            } else {
                swap(&mut a, &mut l, &mut scale, &mut perm, k, k + 1, imax);
                true
            }
        };

        if !two_by_two {
            let d = a[(k, k)];
            if d.abs() <= PIVOT_TOL * scale[k] {
                return Err(Error::SingularMatrix { column: k, pivot: d });
            }
            for i in (k + 1)..dim {
                l[(i, k)] = a[(i, k)] / d;
            }
            for i in (k + 1)..dim {
                for j in (k + 1)..=i {
                    let upd = l[(i, k)] * a[(j, k)];
                    a[(i, j)] -= upd;
                    a[(j, i)] = a[(i, j)];
                }
                scale[i] += (l[(i, k)] * a[(i, k)]).abs();
            }
            if d > 0.0 {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            pivots.push(Pivot::One(d));
            k += 1;
        } else {
            let (p, b, c) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
            let det = p * c - b * b;
            if det == 0.0 {
                return Err(Error::SingularMatrix { column: k, pivot: det });
            }
            for i in (k + 2)..dim {
                let (u, v) = (a[(i, k)], a[(i, k + 1)]);
                l[(i, k)] = (c * u - b * v) / det;
                l[(i, k + 1)] = (p * v - b * u) / det;
            }
            for i in (k + 2)..dim {
                for j in (k + 2)..=i {
                    let upd = l[(i, k)] * a[(j, k)] + l[(i, k + 1)] * a[(j, k + 1)];
                    a[(i, j)] -= upd;
                    a[(j, i)] = a[(i, j)];
                }
                scale[i] += (l[(i, k)] * a[(i, k)]).abs() + (l[(i, k + 1)] * a[(i, k + 1)]).abs();
            }
            if det < 0.0 {
                inertia.positive += 1;
                inertia.negative += 1;
            } else if p + c > 0.0 {
                inertia.positive += 2;
            } else {
                inertia.negative += 2;
            }
            pivots.push(Pivot::Two(p, b, c));
            k += 2;
        }
    }
    Ok(Factorization { w: w.clone(), perm, l, pivots, inertia })
}

impl Factorization {
    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    /// Block-diagonal `D`.
    pub fn d(&self) -> Matrix {
        let dim = self.dim();
        let mut d = Matrix::zeros(dim, dim);
        let mut k = 0;
        for piv in &self.pivots {
            match *piv {
                Pivot::One(v) => {
                    d[(k, k)] = v;
                    k += 1;
                }
                Pivot::Two(a, b, c) => {
                    d[(k, k)] = a;
                    d[(k + 1, k)] = b;
                    d[(k, k + 1)] = b;
                    d[(k + 1, k + 1)] = c;
                    k += 2;
                }
            }
        }
        d
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    /// `P W P^T`.
    pub fn permuted(&self) -> Matrix {
        let dim = self.dim();
        Matrix::from_fn(dim, dim, |i, j| self.w[(self.perm[i], self.perm[j])])
    }

    fn solve_once(&self, rhs: &Vector) -> Vector {
        let dim = self.dim();
        let mut v = Vector::from_fn(dim, |i, _| rhs[self.perm[i]]);
        // L v' = v
        for i in 0..dim {
            let s: f64 = (0..i).map(|j| self.l[(i, j)] * v[j]).sum();
            v[i] -= s;
        }
        let mut k = 0;
        for piv in &self.pivots {
            match *piv {
                Pivot::One(d) => {
                    v[k] /= d;
                    k += 1;
                }
                Pivot::Two(a, b, c) => {
                    let det = a * c - b * b;
                    let (u, w) = (v[k], v[k + 1]);
                    v[k] = (c * u - b * w) / det;
                    v[k + 1] = (a * w - b * u) / det;
                    k += 2;
                }
            }
        }
        for i in (0..dim).rev() {
            let s: f64 = ((i + 1)..dim).map(|j| self.l[(j, i)] * v[j]).sum();
            v[i] -= s;
        }
        let mut out = Vector::zeros(dim);
        for i in 0..dim {
            out[self.perm[i]] = v[i];
        }
        out
    }
}

/// Solves `W sol = rhs` with up to three steps of iterative refinement.
pub fn solve(fac: &Factorization, rhs: &Vector) -> Result<Vector> {
    if rhs.len() != fac.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} entries, system has {}",
            rhs.len(),
            fac.dim()
        )));
    }
    let bound = REFINE_TOL * (1.0 + rhs.norm());
    let mut sol = fac.solve_once(rhs);
    let mut residual = (rhs - &fac.w * &sol).norm();
    for _ in 0..REFINE_STEPS {
        if residual <= bound {
            break;
        }
        let r = rhs - &fac.w * &sol;
        sol += fac.solve_once(&r);
        residual = (rhs - &fac.w * &sol).norm();
    }
    if residual <= bound && sol.iter().all(|v| v.is_finite()) {
        Ok(sol)
    } else {
        Err(Error::RefinementFailure { residual, bound })
    }
}

/// Primal regularization carried between calls to [`inertia_corrected_factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SigmaState {
    /// Last nonzero sigma that produced the correct inertia.
    pub last: f64,
}

impl SigmaState {
    fn first_nonzero(&self) -> f64 {
        if self.last > 0.0 {
            (self.last / SIGMA_SHRINK).max(SIGMA_MIN)
        } else {
            SIGMA_FIRST
        }
    }
}

/// Factorizes with the smallest sigma in the trial sequence
/// `0, s0, 10 s0, 100 s0, ...` that yields inertia `(n, m, 0)`.
pub fn inertia_corrected_factorize(
    h: &Matrix,
    sigma_diag: &Vector,
    jac: &Matrix,
    rho: f64,
    state: &mut SigmaState,
) -> Result<(Factorization, f64)> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    corrected(h, sigma_diag, jac, rho, state)
}

pub(crate) fn corrected(
    h: &Matrix,
    sigma_diag: &Vector,
    jac: &Matrix,
    rho: f64,
    state: &mut SigmaState,
) -> Result<(Factorization, f64)> {
    let (n, m) = (h.nrows(), jac.nrows());
    let target = Inertia::new(n, m, 0);
    let mut sigma = 0.0;
    loop {
        let sys = assemble(h, sigma_diag, jac, rho, sigma)?;
        match factorize(&sys) {
            Ok(fac) if fac.inertia() == target => {
                if sigma > 0.0 {
                    state.last = sigma;
                }
                return Ok((fac, sigma));
            }
            Ok(_) | Err(Error::SingularMatrix { .. }) => {}
            Err(e) => return Err(e),
        }
        sigma = if sigma == 0.0 { state.first_nonzero() } else { sigma * SIGMA_GROW };
        if sigma > SIGMA_MAX {
            return Err(Error::InertiaCorrectionFailure(SIGMA_MAX));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn reconstruction_error(fac: &Factorization) -> f64 {
        let ldl = fac.l() * fac.d() * fac.l().transpose();
        (ldl - fac.permuted()).amax()
    }

    #[test]
    fn assemble_examples() {
        let h = dmatrix![2.0];
        let j = dmatrix![1.0];
        let s = assemble_kkt(&h, &dvector![0.0], &j, 0.1, 0.0).unwrap();
        assert_eq!(s.w, dmatrix![2.0, 1.0; 1.0, -0.1]);
        let s = assemble_kkt(&h, &dvector![0.0], &j, 0.1, 0.5).unwrap();
        assert_eq!(s.w, dmatrix![2.5, 1.0; 1.0, -0.1]);
        let h2 = dmatrix![1.0, 0.5; 0.5, 3.0];
        let s = assemble_kkt(&h2, &dvector![1.0, 2.0], &Matrix::zeros(0, 2), 0.1, 0.25).unwrap();
        assert_eq!(s.w, dmatrix![2.25, 0.5; 0.5, 5.25]);
    }

    #[test]
    fn assemble_errors() {
        let h = dmatrix![2.0];
        assert!(matches!(
            assemble_kkt(&h, &dvector![0.0, 1.0], &dmatrix![1.0], 0.1, 0.0),
            Err(Error::DimensionMismatch(_))
        ));
        assert_eq!(
            assemble_kkt(&dmatrix![f64::NAN], &dvector![0.0], &dmatrix![1.0], 0.1, 0.0).unwrap_err(),
            Error::NonFiniteEntry(0, 0)
        );
        assert!(assemble_kkt(&h, &dvector![0.0], &dmatrix![1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn factorize_examples() {
        let fac = factorize_matrix(&dmatrix![2.0, 1.0; 1.0, -0.1]).unwrap();
        assert_eq!(fac.inertia(), Inertia::new(1, 1, 0));
        let d = fac.d();
        assert_eq!(d[(0, 0)], 2.0);
        assert!((d[(1, 1)] + 0.6).abs() < 1e-15);

        let fac = factorize_matrix(&Matrix::from_diagonal(&dvector![1.0, 1.0, -1.0])).unwrap();
        assert_eq!(fac.inertia(), Inertia::new(2, 1, 0));

        assert!(matches!(factorize_matrix(&dmatrix![0.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn two_by_two_pivot_on_zero_diagonal() {
        let w = dmatrix![0.0, 1.0, 2.0; 1.0, 0.0, 3.0; 2.0, 3.0, 0.0];
        let fac = factorize_matrix(&w).unwrap();
        assert!(fac.pivots.iter().any(|p| matches!(p, Pivot::Two(..))));
        assert!(reconstruction_error(&fac) <= 1e-12);
        // eigenvalues of this matrix: one positive, two negative
        let eig = w.clone().symmetric_eigen().eigenvalues;
        let pos = eig.iter().filter(|&&v| v > 0.0).count();
        assert_eq!(fac.inertia(), Inertia::new(pos, 3 - pos, 0));
    }

    #[test]
    fn solve_examples() {
        let fac = factorize_matrix(&dmatrix![2.0, 1.0; 1.0, -0.1]).unwrap();
        let sol = solve(&fac, &dvector![1.0, 0.0]).unwrap();
        assert!((sol[0] - 1.0 / 12.0).abs() < 1e-15);
        assert!((sol[1] - 10.0 / 12.0).abs() < 1e-15);
        assert_eq!(solve(&fac, &dvector![0.0, 0.0]).unwrap(), dvector![0.0, 0.0]);

        let fac = factorize_matrix(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(solve(&fac, &dvector![1.0, 2.0, 3.0]).unwrap(), dvector![1.0, 2.0, 3.0]);
    }

    #[test]
    fn corrected_quasi_definite_uses_zero_sigma() {
        let h = dmatrix![2.0, 0.3; 0.3, 1.0];
        let j = dmatrix![1.0, -1.0];
        let mut st = SigmaState::default();
        let (fac, sigma) = inertia_corrected_factorize(&h, &dvector![0.0, 0.0], &j, 1e-3, &mut st).unwrap();
        assert_eq!(sigma, 0.0);
        assert_eq!(fac.inertia(), Inertia::new(2, 1, 0));
        assert_eq!(st.last, 0.0);
    }

    #[test]
    fn corrected_negative_curvature() {
        let mut st = SigmaState::default();
        let (fac, sigma) =
            inertia_corrected_factorize(&dmatrix![-1.0], &dvector![0.0], &Matrix::zeros(0, 1), 1.0, &mut st)
                .unwrap();
        // trials 0, 1e-4, ..., 1 (singular), 10
        assert!(sigma > 1.0 && sigma < 10.0 * (1.0 + 1e-12), "sigma = {sigma}");
        assert_eq!(fac.inertia(), Inertia::new(1, 0, 0));
        assert_eq!(st.last, sigma);
        // warm start: next nonzero trial is sigma / 3
        let (_, again) =
            inertia_corrected_factorize(&dmatrix![-1.0], &dvector![0.0], &Matrix::zeros(0, 1), 1.0, &mut st)
                .unwrap();
        assert!((again - sigma / 3.0).abs() < 1e-12);
    }

    #[test]
    fn corrected_zero_hessian_tiny_rho() {
        let h = dmatrix![0.0];
        let j = dmatrix![1.0];
        let rho = 1e-6;
        // dense eigenvalue oracle on [[0, 1], [1, -rho]]
        let eig = dmatrix![0.0, 1.0; 1.0, -rho].symmetric_eigen().eigenvalues;
        let pos = eig.iter().filter(|&&v| v > 0.0).count();
        assert_eq!(pos, 1);
        let mut st = SigmaState::default();
        let (fac, sigma) = inertia_corrected_factorize(&h, &dvector![0.0], &j, rho, &mut st).unwrap();
        assert_eq!(sigma, 0.0);
        assert_eq!(fac.inertia(), Inertia::new(1, 1, 0));
    }

    #[test]
    fn correction_fails_on_rank_deficient_unregularized() {
        let h = Matrix::identity(2, 2);
        let j = dmatrix![1.0, 1.0; 1.0, 1.0];
        let mut st = SigmaState::default();
        assert_eq!(
            corrected(&h, &dvector![0.0, 0.0], &j, 0.0, &mut st).unwrap_err(),
            Error::InertiaCorrectionFailure(SIGMA_MAX)
        );
        // the same Jacobian with dual regularization is fine
        assert!(corrected(&h, &dvector![0.0, 0.0], &j, 1e-8, &mut st).is_ok());
    }
}
