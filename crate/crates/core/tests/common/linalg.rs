//! Random dense KKT instances and the uncondensed Newton system used as
//! an oracle for the condensed solve.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub struct Instance {
    pub h: DMatrix<f64>,
    pub sigma_diag: DVector<f64>,
    pub jac: DMatrix<f64>,
    pub rho: f64,
    pub yhat: DVector<f64>,
    pub lambda: DVector<f64>,
    pub y: DVector<f64>,
    pub grad_lag: DVector<f64>,
    pub c: DVector<f64>,
}

pub fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn instance(rng: &mut impl Rng, convex: bool) -> Instance {
    let n = rng.random_range(1..=10);
    let m = rng.random_range(0..=n.min(5));
    let a = random_matrix(rng, n, n);
    let h = if convex { a.transpose() * &a + DMatrix::identity(n, n) } else { (&a + a.transpose()) * 2.0 };
    let rho = 10f64.powi(-rng.random_range(1..=8));
    Instance {
        h,
        sigma_diag: DVector::from_fn(n, |_, _| rng.random_range(0.0..2.0)),
        jac: random_matrix(rng, m, n),
        rho,
        yhat: random_vector(rng, m),
        lambda: random_vector(rng, m),
        y: random_vector(rng, m),
        grad_lag: random_vector(rng, n),
        c: random_vector(rng, m),
    }
}

/// Newton system of the problem with `lambda` kept explicit:
/// unknowns `(dx, dlambda, dy)`.
pub fn full_system(p: &Instance, sigma: f64) -> (DMatrix<f64>, DVector<f64>) {
    let (n, m) = (p.h.nrows(), p.jac.nrows());
    let mut k = DMatrix::zeros(n + 2 * m, n + 2 * m);
    let mut hh = p.h.clone();
    for i in 0..n {
        hh[(i, i)] += p.sigma_diag[i] + sigma;
    }
    k.view_mut((0, 0), (n, n)).copy_from(&hh);
    k.view_mut((0, n + m), (n, m)).copy_from(&p.jac.transpose());
    for i in 0..m {
        k[(n + i, n + i)] = p.rho;
        k[(n + i, n + m + i)] = -p.rho;
        k[(n + m + i, n + i)] = -p.rho;
    }
    k.view_mut((n + m, 0), (m, n)).copy_from(&p.jac);
    let mut rhs = DVector::zeros(n + 2 * m);
    rhs.rows_mut(0, n).copy_from(&(-&p.grad_lag));
    rhs.rows_mut(n, m).copy_from(&(-p.rho * (&p.lambda - &p.y)));
    rhs.rows_mut(n + m, m).copy_from(&(-(&p.c + p.rho * (&p.yhat - &p.lambda))));
    (k, rhs)
}

pub fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}


/// Errors of the condensed solve against the uncondensed oracle:
/// `(inertia correct, rel. error in dx, rel. error in dy, error in dlambda)`.
pub fn condensed_vs_full(p: &Instance) -> (bool, f64, f64, f64) {
    use regip_core::kkt::{inertia_corrected_factorize, solve, Inertia, SigmaState};
    let (n, m) = (p.h.nrows(), p.jac.nrows());
    let (fac, sigma) =
        inertia_corrected_factorize(&p.h, &p.sigma_diag, &p.jac, p.rho, &mut SigmaState::default()).unwrap();
    let mut rhs = DVector::zeros(n + m);
    rhs.rows_mut(0, n).copy_from(&(-&p.grad_lag));
    rhs.rows_mut(n, m).copy_from(&(-(&p.c + p.rho * (&p.yhat - &p.y))));
    let sol = solve(&fac, &rhs).unwrap();
    let (k, full_rhs) = full_system(p, sigma);
    let full = k.lu().solve(&full_rhs).expect("full system nonsingular");
    let dx_err = rel(&sol.rows(0, n).into_owned(), &full.rows(0, n).into_owned());
    if m == 0 {
        return (fac.inertia() == Inertia::new(n, m, 0), dx_err, 0.0, 0.0);
    }
    let fdy = full.rows(n + m, m).into_owned();
    let dy_err = rel(&sol.rows(n, m).into_owned(), &fdy);
    let expected = &fdy - (&p.lambda - &p.y);
    let dl_err = (full.rows(n, m) - &expected).norm() / (1.0 + expected.norm());
    (fac.inertia() == Inertia::new(n, m, 0), dx_err, dy_err, dl_err)
}
