//! Independent KKT solver for small instances: for every subset `A` of
//! bound constraints held at zero, Newton's method with LU solves
//! `grad_F f + J_F^T y = 0, c(x) = 0` in the free variables from several
//! random starts. Candidates with `x >= 0` and `z_A <= 0` are kept.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regip_core::NlpProblem;

#[derive(Debug, Clone)]
pub struct KktPoint {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub f: f64,
}

fn residual(p: &NlpProblem, x: &DVector<f64>, y: &DVector<f64>, free: &[usize]) -> Option<DVector<f64>> {
    let g = p.gradient(x).ok()?;
    let c = p.constraints(x).ok()?;
    let j = p.jacobian(x).ok()?;
    let lag = g + j.transpose() * y;
    let mut r = DVector::zeros(free.len() + p.m());
    for (k, &i) in free.iter().enumerate() {
        r[k] = lag[i];
    }
    r.rows_mut(free.len(), p.m()).copy_from(&c);
    Some(r)
}

fn newton(p: &NlpProblem, mut x: DVector<f64>, mut y: DVector<f64>, free: &[usize]) -> Option<(DVector<f64>, DVector<f64>)> {
    let (nf, m) = (free.len(), p.m());
    for _ in 0..100 {
        let r = residual(p, &x, &y, free)?;
        let norm = r.norm();
        if norm < 1e-13 {
            return Some((x, y));
        }
        let h = p.hessian(&x, &y).ok()?;
        let j = p.jacobian(&x).ok()?;
        let mut k = DMatrix::zeros(nf + m, nf + m);
        for (a, &i) in free.iter().enumerate() {
            for (b, &l) in free.iter().enumerate() {
                k[(a, b)] = h[(i, l)];
            }
            for row in 0..m {
                k[(nf + row, a)] = j[(row, i)];
                k[(a, nf + row)] = j[(row, i)];
            }
        }
        let step = k.lu().solve(&(-&r))?;
        let mut t = 1.0;
        loop {
            let mut xt = x.clone();
            for (a, &i) in free.iter().enumerate() {
                xt[i] += t * step[a];
            }
            let yt = &y + t * step.rows(nf, m);
            if let Some(rt) = residual(p, &xt, &yt, free) {
                if rt.norm().is_finite() && rt.norm() < (1.0 - 1e-4 * t) * norm {
                    x = xt;
                    y = yt;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
    }
    None
}

/// All KKT points found, best objective first.
pub fn kkt_points(p: &NlpProblem, starts: usize, seed: u64) -> Vec<KktPoint> {
    let (n, m) = (p.n(), p.m());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<KktPoint> = Vec::new();
    for mask in 0u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        for s in 0..starts {
            let mut x = DVector::zeros(n);
            for &i in &free {
                x[i] = if s == 0 { p.x0()[i].max(0.1) } else { rng.random_range(0.0..4.0) };
            }
            let y = if s == 0 { DVector::zeros(m) } else { DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0)) };
            let Some((x, y)) = newton(p, x, y, &free) else { continue };
            if x.iter().any(|&v| v < -1e-12) {
                continue;
            }
            let x = x.map(|v| v.max(0.0));
            let Ok(g) = p.gradient(&x) else { continue };
            let Ok(j) = p.jacobian(&x) else { continue };
            let mut z = -(g + j.transpose() * &y);
            for &i in &free {
                z[i] = 0.0;
            }
            if z.iter().any(|&v| v > 1e-10) {
                continue;
            }
            let Ok(f) = p.objective(&x) else { continue };
            if !found.iter().any(|q| (&q.x - &x).amax() < 1e-8) {
                found.push(KktPoint { x, y, z, f });
            }
        }
    }
    found.sort_by(|a, b| a.f.total_cmp(&b.f));
    found
}
