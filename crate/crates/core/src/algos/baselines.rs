//! Comparison baselines: EXP3, EXP3.S (tuned with the true switch count), and uniform play.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_shape, query_loss, BanditAlgorithm, Step};
use crate::error::{Error, Result};
use crate::simplex::Distribution;

/// Exponential-weights state shared by the EXP3 family.
///
/// Weights are kept normalized (they sum to one) so they stay finite over any horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineState {
    pub horizon: usize,
    pub arms: usize,
    pub learning_rate: f64,
    /// Uniform exploration mixed into the sampling distribution (EXP3.S only).
    pub exploration: f64,
    /// Fixed-share mass redistributed uniformly after each update (EXP3.S only).
    pub share: f64,
    pub weights: Vec<f64>,
    pub round: usize,
}

impl BaselineState {
    pub fn policy(&self) -> Distribution {
        let k = self.arms as f64;
        let g = self.exploration;
        Distribution::from_raw_unchecked(self.weights.iter().map(|w| (1.0 - g) * w + g / k).collect())
    }
}

/// EXP3 with losses: `w_a <- w_a exp(-eta l_a / p_a)` for the played arm,
/// `eta = sqrt(2 ln K / (T K))`.
#[derive(Clone, Debug)]
pub struct Exp3 {
    state: BaselineState,
    /// Log-weights shifted so the maximum is zero.
    log_weights: Vec<f64>,
}

impl Exp3 {
    pub fn new(horizon: usize, arms: usize) -> Result<Self> {
        check_shape(horizon, arms)?;
        let k = arms as f64;
        let learning_rate = (2.0 * k.ln() / (horizon as f64 * k)).sqrt();
        Ok(Self {
            state: BaselineState {
                horizon,
                arms,
                learning_rate,
                exploration: 0.0,
                share: 0.0,
                weights: vec![1.0 / k; arms],
                round: 0,
            },
            log_weights: vec![0.0; arms],
        })
    }

    pub fn state(&self) -> &BaselineState {
        &self.state
    }

    fn refresh_weights(&mut self) {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter_mut().for_each(|w| *w -= max);
        let total: f64 = self.log_weights.iter().map(|w| w.exp()).sum();
        for (w, lw) in self.state.weights.iter_mut().zip(&self.log_weights) {
            *w = lw.exp() / total;
        }
    }
}

impl BanditAlgorithm for Exp3 {
    fn name(&self) -> &'static str {
        "exp3"
    }

    fn num_arms(&self) -> usize {
        self.state.arms
    }

    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step> {
        let policy = self.state.policy();
        let arm = policy.sample(rng);
        let loss = query_loss(self.state.round + 1, arm, loss_query)?;
        if loss > 0.0 {
            let estimate = loss / policy.get(arm);
            if !estimate.is_finite() {
                return Err(Error::EstimatorOverflow { index: arm });
            }
            self.log_weights[arm] -= self.state.learning_rate * estimate;
            self.refresh_weights();
        }
        self.state.round += 1;
        Ok(Step { base: None, arm, loss, feedback: None })
    }
}

/// EXP3.S in reward form with a fixed-share mixing step, tuned for a known switch count `S`:
/// share `1/T`, exploration `min(1, sqrt(K (S ln(KT) + e) / ((e - 1) T)))`.
#[derive(Clone, Debug)]
pub struct Exp3S {
    state: BaselineState,
}

impl Exp3S {
    pub fn new(horizon: usize, arms: usize, switches: usize) -> Result<Self> {
        check_shape(horizon, arms)?;
        let t = horizon as f64;
        let k = arms as f64;
        let e = std::f64::consts::E;
        let exploration = (k * (switches as f64 * (k * t).ln() + e) / ((e - 1.0) * t)).sqrt().min(1.0);
        Self::with_parameters(horizon, arms, exploration, 1.0 / t)
    }

    pub fn with_parameters(horizon: usize, arms: usize, exploration: f64, share: f64) -> Result<Self> {
        check_shape(horizon, arms)?;
        if !(exploration > 0.0 && exploration <= 1.0) {
            return Err(Error::InvalidParameter { name: "exploration", reason: format!("{exploration} is outside (0, 1]") });
        }
        if !(0.0..=1.0).contains(&share) {
            return Err(Error::InvalidParameter { name: "share", reason: format!("{share} is outside [0, 1]") });
        }
        let k = arms as f64;
        Ok(Self {
            state: BaselineState {
                horizon,
                arms,
                learning_rate: exploration / k,
                exploration,
                share,
                weights: vec![1.0 / k; arms],
                round: 0,
            },
        })
    }

    pub fn state(&self) -> &BaselineState {
        &self.state
    }
}

impl BanditAlgorithm for Exp3S {
    fn name(&self) -> &'static str {
        "exp3s"
    }

    fn num_arms(&self) -> usize {
        self.state.arms
    }

    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step> {
        let policy = self.state.policy();
        let arm = policy.sample(rng);
        let loss = query_loss(self.state.round + 1, arm, loss_query)?;
        let st = &mut self.state;
        // reward estimate <= K / exploration, so the exponent is at most 1
        let reward_estimate = (1.0 - loss) / policy.get(arm);
        st.weights[arm] *= (st.learning_rate * reward_estimate).exp();
        let total: f64 = st.weights.iter().sum();
        let k = st.arms as f64;
        for w in st.weights.iter_mut() {
            *w = (1.0 - st.share) * *w / total + st.share / k;
        }
        st.round += 1;
        Ok(Step { base: None, arm, loss, feedback: None })
    }
}

/// Plays uniformly at random; the reference point for "beats random".
#[derive(Clone, Debug)]
pub struct UniformPolicy {
    policy: Distribution,
    round: usize,
}

impl UniformPolicy {
    pub fn new(arms: usize) -> Result<Self> {
        Ok(Self { policy: Distribution::uniform(arms)?, round: 0 })
    }
}

impl BanditAlgorithm for UniformPolicy {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn num_arms(&self) -> usize {
        self.policy.dimension()
    }

    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step> {
        let arm = self.policy.sample(rng);
        let loss = query_loss(self.round + 1, arm, loss_query)?;
        self.round += 1;
        Ok(Step { base: None, arm, loss, feedback: None })
    }
}
