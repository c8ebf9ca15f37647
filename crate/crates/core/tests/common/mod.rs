#![allow(dead_code)]

pub mod linalg;
pub mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for pseudo-random instances; `REGIP_SEED` overrides the default.
pub fn seed() -> u64 {
    std::env::var("REGIP_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_250_101)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Root of a continuous increasing function on `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "root not bracketed");
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Five interior points scattered around `x0`.
pub fn seeded_points(n: usize, x0: &regip_core::Vector, rng: &mut impl rand::Rng) -> Vec<regip_core::Vector> {
    (0..5)
        .map(|_| {
            regip_core::Vector::from_fn(n, |i, _| {
                x0[i].max(0.1) * rng.random_range(0.5..1.5) + rng.random_range(0.05..0.5)
            })
        })
        .collect()
}
