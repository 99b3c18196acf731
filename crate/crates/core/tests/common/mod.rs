//! Reference solvers written independently of the library code paths.
#![allow(dead_code)]

use rand::Rng;

/// KL projection of `q / sum(q)` onto `{p : sum p = 1, p >= floor}` by bisection on the
/// scale `c` in the optimality condition `p_i = max(c q_i, floor)`.
pub fn kl_projection_oracle(raw: &[f64], floor: f64) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    let q: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mass = |c: f64| q.iter().map(|&x| (c * x).max(floor)).sum::<f64>();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while mass(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    q.iter().map(|&x| (c * x).max(floor)).collect()
}

/// KL divergence `sum p log(p / q)` against the normalized `raw`.
pub fn kl(p: &[f64], raw: &[f64]) -> f64 {
    let total: f64 = raw.iter().sum();
    p.iter().zip(raw).filter(|(pi, _)| **pi > 0.0).map(|(pi, r)| pi * (pi / (r / total)).ln()).sum()
}

/// Random loss table with entries drawn from `{0, 1}` or `[0, 1)`.
pub fn random_table<R: Rng>(rng: &mut R, horizon: usize, arms: usize, binary: bool) -> Vec<Vec<f64>> {
    (0..horizon)
        .map(|_| {
            (0..arms)
                .map(|_| if binary { f64::from(rng.random_bool(0.5) as u8) } else { rng.random::<f64>() })
                .collect()
        })
        .collect()
}

/// Random distribution with every weight at least `floor`.
pub fn random_distribution<R: Rng>(rng: &mut R, d: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * d as f64;
    raw.iter().map(|x| floor + free * x / total).collect()
}
