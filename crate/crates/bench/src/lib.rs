//! Deterministic fixtures shared by the benchmarks.

use regip_core::{Matrix, Vector};

/// A condensed KKT instance with `n` variables and `m` constraints.
pub struct KktFixture {
    pub h: Matrix,
    pub sigma_diag: Vector,
    pub jac: Matrix,
    pub rho: f64,
    pub rhs: Vector,
}

/// Smooth pseudo-random entries in [-1, 1] with no RNG state to seed.
fn wave(i: usize, j: usize, salt: f64) -> f64 {
    ((i as f64 + 1.0) * 12.9898 + (j as f64 + 1.0) * 78.233 + salt).sin()
}

/// Builds an instance whose Hessian is indefinite when `convex` is false,
/// so the inertia correction has work to do.
pub fn kkt_fixture(n: usize, m: usize, convex: bool) -> KktFixture {
    let a = Matrix::from_fn(n, n, |i, j| wave(i, j, 0.5));
    let h = if convex { a.transpose() * &a + Matrix::identity(n, n) } else { &a + a.transpose() };
    KktFixture {
        h,
        sigma_diag: Vector::from_fn(n, |i, _| 0.1 + wave(i, 0, 2.0).abs()),
        jac: Matrix::from_fn(m, n, |i, j| wave(i, j, 7.0)),
        rho: 1e-6,
        rhs: Vector::from_fn(n + m, |i, _| wave(i, 3, 1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        let f = kkt_fixture(6, 2, false);
        assert_eq!((f.h.nrows(), f.h.ncols()), (6, 6));
        assert_eq!((f.jac.nrows(), f.jac.ncols()), (2, 6));
        assert_eq!(f.rhs.len(), 8);
        assert_eq!(f.h, f.h.transpose());
    }
}
