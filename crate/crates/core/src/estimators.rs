//! Importance-weighted loss estimates for the two sampling layers.
//!
//! Only the sampled base (and, within it, the sampled arm) receives a nonzero
//! estimate, so estimates are carried as a single `(index, value)` pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed below a floor before a probability counts as a violation.
pub const FLOOR_SLACK: f64 = 1e-12;

/// What one round of bandit feedback looked like.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub chosen_base: usize,
    pub chosen_arm: usize,
    pub observed_loss: f64,
    /// `p_t(h_t)`.
    pub master_prob: f64,
    /// `p_{t,h_t}(a_t)`.
    pub base_arm_prob: f64,
}

impl FeedbackRecord {
    pub fn new(chosen_base: usize, chosen_arm: usize, observed_loss: f64, master_prob: f64, base_arm_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&observed_loss) {
            return Err(Error::InvalidParameter { name: "observed_loss", reason: format!("{observed_loss} is outside [0, 1]") });
        }
        for (name, p) in [("master_prob", master_prob), ("base_arm_prob", base_arm_prob)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter { name, reason: format!("{p} is outside (0, 1]") });
            }
        }
        Ok(Self { chosen_base, chosen_arm, observed_loss, master_prob, base_arm_prob })
    }
}

/// A vector that is zero except (possibly) at one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseEstimate {
    pub dimension: usize,
    pub entry: Option<(usize, f64)>,
}

impl SparseEstimate {
    pub fn zero(dimension: usize) -> Self {
        Self { dimension, entry: None }
    }

    pub fn is_zero(&self) -> bool {
        self.entry.is_none_or(|(_, v)| v == 0.0)
    }

    pub fn value_at(&self, index: usize) -> f64 {
        match self.entry {
            Some((i, v)) if i == index => v,
            _ => 0.0,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.entry.map_or(0.0, |(_, v)| v)
    }

    /// Writes the dense form into `out`, zeroing everything else.
    pub fn write_dense(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dimension);
        out.iter_mut().for_each(|x| *x = 0.0);
        if let Some((i, v)) = self.entry {
            out[i] = v;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.write_dense(&mut out);
        out
    }
}

fn check_floor(prob: f64, floor: f64) -> Result<()> {
    if prob < floor - FLOOR_SLACK {
        return Err(Error::FloorViolation { prob, floor });
    }
    Ok(())
}

/// `l'_t(h) = l_t(a_t) 1(h = h_t) / p_t(h)` over all bases.
pub fn master_estimate(fb: &FeedbackRecord, num_bases: usize, master_floor: f64) -> Result<SparseEstimate> {
    if fb.chosen_base >= num_bases {
        return Err(Error::DimensionMismatch { expected: num_bases, got: fb.chosen_base + 1 });
    }
    check_floor(fb.master_prob, master_floor)?;
    let value = fb.observed_loss / fb.master_prob;
    Ok(SparseEstimate { dimension: num_bases, entry: Some((fb.chosen_base, value)) })
}

/// `l''_{t,h}(a) = l'_t(h) 1(a = a_t) / p_{t,h}(a)` over the arms of `target_base`.
///
/// The estimate is identically zero unless `target_base` is the sampled base.
pub fn base_arm_estimate(
    fb: &FeedbackRecord,
    target_base: usize,
    num_arms: usize,
    master_floor: f64,
    base_floor: f64,
) -> Result<SparseEstimate> {
    if fb.chosen_arm >= num_arms {
        return Err(Error::DimensionMismatch { expected: num_arms, got: fb.chosen_arm + 1 });
    }
    if target_base != fb.chosen_base {
        return Ok(SparseEstimate::zero(num_arms));
    }
    check_floor(fb.master_prob, master_floor)?;
    check_floor(fb.base_arm_prob, base_floor)?;
    let value = fb.observed_loss / (fb.master_prob * fb.base_arm_prob);
    Ok(SparseEstimate { dimension: num_arms, entry: Some((fb.chosen_arm, value)) })
}
