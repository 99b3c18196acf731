//! Per-run traces.

use serde::{Deserialize, Serialize};

use crate::env::LossMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based round.
    pub t: usize,
    /// Sampled base for master-base learners.
    pub base: Option<usize>,
    pub arm: usize,
    pub loss: f64,
}

/// Optional per-round series of learning-rate state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Instrumentation {
    /// Index into the candidate grid of the near-optimal base for the configured `S`.
    pub h_dagger: Option<usize>,
    /// `p_t(h_dagger)` per round (before the round's update).
    pub h_dagger_prob: Vec<f64>,
    /// `rho_t(h)` per round, one vector per round.
    pub thresholds: Vec<Vec<f64>>,
    /// `xi_t(h)` per round.
    pub master_rates: Vec<Vec<f64>>,
    /// Base learning rates per round.
    pub base_rates: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instrumentation: Option<Instrumentation>,
}

impl RunRecord {
    pub fn total_loss(&self) -> f64 {
        self.steps.iter().map(|s| s.loss).sum()
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// Checks that rounds cover `1..=T` once and every loss matches the table.
    pub fn validate(&self, matrix: &LossMatrix) -> Result<()> {
        if self.steps.len() != matrix.horizon() {
            return Err(Error::TraceMismatch(format!(
                "trace has {} steps, table has {} rounds",
                self.steps.len(),
                matrix.horizon()
            )));
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.t != i + 1 {
                return Err(Error::TraceMismatch(format!("step {i} is labelled t = {}", s.t)));
            }
            if s.arm >= matrix.arms() {
                return Err(Error::TraceMismatch(format!("arm {} at t = {} out of range", s.arm, s.t)));
            }
            let expected = matrix.loss(s.t, s.arm);
            if s.loss.to_bits() != expected.to_bits() {
                return Err(Error::TraceMismatch(format!(
                    "loss {} at t = {} differs from table value {expected}",
                    s.loss, s.t
                )));
            }
        }
        Ok(())
    }

    /// CSV form: `t,h,a,loss` (empty `h` for single-level learners).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,h,a,loss\n");
        for s in &self.steps {
            let h = s.base.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", s.t, h, s.arm, s.loss));
        }
        out
    }
}
