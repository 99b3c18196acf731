//! Probability vectors, sampling, and Bregman projections onto clipped simplexes.
//!
//! A clipped simplex is `{p : sum(p) = 1, p_i >= floor}`. Two projections are
//! provided, one per regularizer used by the learners:
//!
//! - [`project_entropy`]: the KL (negative-entropy) projection. The minimizer has
//!   the form `p_i = max(c * q_i, floor)` for the normalized input `q` and a
//!   scalar `c > 0`; the floored set is grown until stable (at most `d` passes).
//! - [`project_logbarrier`]: the log-barrier projection. The minimizer has the
//!   form `p_i = clamp(1 / (r_i + xi_i * lambda), floor, 1)`; `lambda` is found
//!   by bisection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) = 1` accepted by [`Distribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Target accuracy of the log-barrier normalization.
pub const BISECTION_TOLERANCE: f64 = 1e-10;

/// Hard cap on bisection iterations.
pub const MAX_BISECTION_ITERS: usize = 200;

/// A probability vector over a finite action set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and unit mass (within [`SUM_TOLERANCE`]).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {} at index {i} is negative or non-finite",
                weights[i]
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDistribution("dimension must be >= 1".into()));
        }
        Ok(Self { weights: vec![1.0 / dimension as f64; dimension] })
    }

    /// Point mass on `index`.
    pub fn point_mass(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(Error::InvalidDistribution(format!(
                "index {index} out of range for dimension {dimension}"
            )));
        }
        let mut weights = vec![0.0; dimension];
        weights[index] = 1.0;
        Ok(Self { weights })
    }

    pub(crate) fn from_raw_unchecked(weights: Vec<f64>) -> Self {
        debug_assert!(!weights.is_empty());
        Self { weights }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Inverse-CDF draw over the stored coordinate order.
    ///
    /// Consumes exactly one `f64` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last_positive = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                last_positive = i;
                cumulative += w;
                if u < cumulative {
                    return i;
                }
            }
        }
        // u landed in the rounding gap above the accumulated mass
        last_positive
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(dist: Distribution) -> Self {
        dist.weights
    }
}

impl AsRef<[f64]> for Distribution {
    fn as_ref(&self) -> &[f64] {
        &self.weights
    }
}

/// `P_{d-1} ∩ [floor, 1]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClippedSimplex {
    dimension: usize,
    floor: f64,
}

impl ClippedSimplex {
    pub fn new(dimension: usize, floor: f64) -> Result<Self> {
        if dimension == 0 || !floor.is_finite() || floor < 0.0 {
            return Err(Error::InfeasibleDomain { dimension, floor });
        }
        // Allow a hair of rounding slack so that floor = 1/d is accepted.
        if floor * dimension as f64 > 1.0 + 1e-12 {
            return Err(Error::InfeasibleDomain { dimension, floor });
        }
        Ok(Self { dimension, floor })
    }

    /// The plain probability simplex.
    pub fn unclipped(dimension: usize) -> Result<Self> {
        Self::new(dimension, 0.0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// True when the only feasible point is the uniform distribution.
    pub fn is_singleton(&self) -> bool {
        self.floor * self.dimension as f64 >= 1.0 - 1e-15
    }

    pub fn contains(&self, dist: &Distribution, tol: f64) -> bool {
        dist.dimension() == self.dimension
            && dist.weights().iter().all(|&w| w >= self.floor - tol)
            && (dist.weights().iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE
    }
}

/// How the floor constraint is enforced after an unconstrained step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClipMode {
    /// Exact Bregman projection onto the clipped simplex.
    #[default]
    Project,
    /// Normalize, then mix with the uniform distribution: `(1 - eps) p + eps / d`, `eps = d * floor`.
    Mix,
}

impl std::str::FromStr for ClipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "project" => Ok(ClipMode::Project),
            "mix" => Ok(ClipMode::Mix),
            other => Err(Error::config("clip_mode", format!("unknown mode `{other}` (expected project|mix)"))),
        }
    }
}

fn check_dimension(len: usize, domain: &ClippedSimplex) -> Result<()> {
    if len != domain.dimension {
        return Err(Error::DimensionMismatch { expected: domain.dimension, got: len });
    }
    Ok(())
}

fn normalize(raw: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = raw.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidParameter {
            name: "raw",
            reason: format!("entry {i} = {} is negative or non-finite", raw[i]),
        });
    }
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateProjection);
    }
    Ok(raw.iter().map(|x| x / total).collect())
}

/// KL projection of `raw / sum(raw)` onto `domain`.
pub fn project_entropy(raw: &[f64], domain: &ClippedSimplex) -> Result<Distribution> {
    check_dimension(raw.len(), domain)?;
    let q = normalize(raw)?;
    let floor = domain.floor;
    if floor == 0.0 {
        return Ok(Distribution::from_raw_unchecked(q));
    }
    if domain.is_singleton() {
        return Distribution::uniform(domain.dimension);
    }

    let d = q.len();
    let mut floored = vec![false; d];
    let mut scale = 1.0;
    // Each pass only grows the floored set, so d + 1 passes always suffice.
    for _ in 0..=d {
        let n_floored = floored.iter().filter(|&&f| f).count();
        let free_mass = (1.0 - n_floored as f64 * floor).max(0.0);
        let free_q: f64 = q.iter().zip(&floored).filter(|(_, &f)| !f).map(|(x, _)| x).sum();
        if free_q <= 0.0 {
            floored.iter_mut().for_each(|f| *f = true);
            break;
        }
        scale = free_mass / free_q;
        let mut changed = false;
        for (i, &qi) in q.iter().enumerate() {
            if !floored[i] && scale * qi < floor {
                floored[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let weights = q
        .iter()
        .zip(&floored)
        .map(|(&qi, &f)| if f { floor } else { scale * qi })
        .collect();
    Ok(Distribution::from_raw_unchecked(weights))
}

/// Result of a log-barrier projection together with its normalization multiplier.
#[derive(Clone, Debug)]
pub struct LogBarrierProjection {
    pub dist: Distribution,
    /// The scalar `lambda` in `p_i = clamp(1 / (r_i + xi_i * lambda), floor, 1)`.
    pub multiplier: f64,
}

/// Log-barrier projection of the point with inverse coordinates `raw_inverse` under rates `rates`.
pub fn project_logbarrier(raw_inverse: &[f64], rates: &[f64], domain: &ClippedSimplex) -> Result<Distribution> {
    project_logbarrier_with_multiplier(raw_inverse, rates, domain).map(|p| p.dist)
}

pub fn project_logbarrier_with_multiplier(
    raw_inverse: &[f64],
    rates: &[f64],
    domain: &ClippedSimplex,
) -> Result<LogBarrierProjection> {
    check_dimension(raw_inverse.len(), domain)?;
    check_dimension(rates.len(), domain)?;
    if let Some(i) = raw_inverse.iter().position(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::BracketFailure(format!("inverse coordinate {i} = {} is not positive", raw_inverse[i])));
    }
    if let Some(i) = rates.iter().position(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidParameter { name: "rates", reason: format!("rate {i} = {} is not positive", rates[i]) });
    }
    if domain.is_singleton() {
        return Ok(LogBarrierProjection { dist: Distribution::uniform(domain.dimension)?, multiplier: f64::NAN });
    }

    let floor = domain.floor;
    let eval = |lambda: f64, out: &mut [f64]| -> f64 {
        let mut sum = 0.0;
        for ((o, &r), &xi) in out.iter_mut().zip(raw_inverse).zip(rates) {
            *o = (1.0 / (r + xi * lambda)).clamp(floor, 1.0);
            sum += *o;
        }
        sum
    };

    // Denominators stay positive for lambda > lambda_min.
    let (pivot, lambda_min) = raw_inverse
        .iter()
        .zip(rates)
        .map(|(&r, &xi)| -r / xi)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let d = domain.dimension as f64;
    // At lo the pivot coordinate has denominator ~1/2, so it clamps to 1 and the sum is >= 1.
    let mut lo = lambda_min + 0.5 / rates[pivot];
    // At hi every coordinate is <= 1/d, so the sum is <= 1.
    let mut hi = raw_inverse
        .iter()
        .zip(rates)
        .map(|(&r, &xi)| (d - r) / xi)
        .fold(lo, f64::max);

    let mut buf = vec![0.0; raw_inverse.len()];
    let f_lo = eval(lo, &mut buf);
    let f_hi = eval(hi, &mut buf);
    if !(f_lo >= 1.0) || !(f_hi <= 1.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BracketFailure(format!(
            "could not bracket normalization: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }

    let mut best = if (f_lo - 1.0).abs() <= (f_hi - 1.0).abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..MAX_BISECTION_ITERS {
        if (best.1 - 1.0).abs() <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(mid, &mut buf);
        if (f_mid - 1.0).abs() < (best.1 - 1.0).abs() {
            best = (mid, f_mid);
        }
        if f_mid > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - 1.0).abs() > BISECTION_TOLERANCE {
        return Err(Error::BracketFailure(format!(
            "normalization did not converge: sum = {} after {MAX_BISECTION_ITERS} iterations",
            best.1
        )));
    }
    eval(best.0, &mut buf);
    Ok(LogBarrierProjection { dist: Distribution::from_raw_unchecked(buf), multiplier: best.0 })
}

/// Normalize `raw`, then mix with uniform so that every coordinate is at least the floor.
pub fn mix_uniform(raw: &[f64], domain: &ClippedSimplex) -> Result<Distribution> {
    check_dimension(raw.len(), domain)?;
    let q = normalize(raw)?;
    let d = q.len() as f64;
    let eps = (domain.floor * d).min(1.0);
    let weights = q.iter().map(|x| ((1.0 - eps) * x + eps / d).max(domain.floor)).collect();
    Ok(Distribution::from_raw_unchecked(weights))
}
