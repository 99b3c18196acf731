use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_shape, query_loss, AlgorithmOptions, BanditAlgorithm, InstrumentSample, Step};
use crate::error::{Error, Result};
use crate::estimators::{base_arm_estimate, master_estimate, FeedbackRecord};
use crate::grid::CandidateGrid;
use crate::omd::{entropy_step, logbarrier_step, EntropyStepParams, LogBarrierStepParams};
use crate::simplex::{ClipMode, ClippedSimplex, Distribution};

/// Full state of the adaptive master-base learner.
///
/// The master runs log-barrier OMD with per-base rates `xi(h)`; base `h` runs
/// exponential weights at `eta_t(h) = sqrt(h / (K T rho_t(h)))`, where the
/// threshold `rho_t(h)` tracks the largest inverse master probability seen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alg2State {
    pub horizon: usize,
    pub arms: usize,
    pub grid: CandidateGrid,
    pub alpha: f64,
    pub beta: f64,
    /// Rate growth factor `exp(1 / log T)`.
    pub gamma: f64,
    /// Initial master rate `sqrt(H / T)`.
    pub eta: f64,
    pub master: Distribution,
    pub bases: Vec<Distribution>,
    /// `xi_t(h)`.
    pub master_rates: Vec<f64>,
    /// `rho_t(h)`.
    pub thresholds: Vec<f64>,
    /// Number of times `xi(h)` has been multiplied by `gamma`.
    pub increases: Vec<u32>,
    pub clip_mode: ClipMode,
    pub round: usize,
}

impl Alg2State {
    pub fn init(horizon: usize, arms: usize) -> Result<Self> {
        Self::init_with(horizon, arms, AlgorithmOptions::default())
    }

    pub fn init_with(horizon: usize, arms: usize, options: AlgorithmOptions) -> Result<Self> {
        check_shape(horizon, arms)?;
        let grid = CandidateGrid::build_with_base(horizon, options.log_base)?;
        let gamma = (1.0 / options.log_base.log(horizon as f64)).exp();
        let mut state = Self::init_with_grid(arms, grid, gamma)?;
        state.clip_mode = options.clip_mode;
        Ok(state)
    }

    pub fn init_with_grid(arms: usize, grid: CandidateGrid, gamma: f64) -> Result<Self> {
        let horizon = grid.horizon();
        check_shape(horizon, arms)?;
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter { name: "gamma", reason: format!("{gamma} must exceed 1") });
        }
        let t = horizon as f64;
        let k = arms as f64;
        let n = grid.len();
        let h = n as f64;
        let alpha = 1.0 / (t * h);
        let beta = 1.0 / (t * k);
        let eta = (h / t).sqrt();
        Ok(Self {
            horizon,
            arms,
            alpha,
            beta,
            gamma,
            eta,
            master: Distribution::uniform(n)?,
            bases: vec![Distribution::uniform(arms)?; n],
            master_rates: vec![eta; n],
            thresholds: vec![2.0 * h; n],
            increases: vec![0; n],
            grid,
            clip_mode: ClipMode::Project,
            round: 0,
        })
    }

    /// `eta_t(h)` from the current threshold.
    pub fn base_rate(&self, h: usize) -> f64 {
        (self.grid.values()[h] / (self.arms as f64 * self.horizon as f64 * self.thresholds[h])).sqrt()
    }

    pub fn base_rates(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|h| self.base_rate(h)).collect()
    }

    /// `rho_1(h) = 2H`.
    pub fn initial_threshold(&self) -> f64 {
        2.0 * self.grid.len() as f64
    }

    /// Raises `xi(h)` by `gamma` and resets `rho(h) = 2 / p(h)` for every base whose
    /// inverse master probability exceeds its threshold.
    pub fn apply_threshold_rule(&mut self) {
        for h in 0..self.grid.len() {
            let p = self.master.get(h);
            if 1.0 / p > self.thresholds[h] {
                self.thresholds[h] = 2.0 / p;
                self.master_rates[h] *= self.gamma;
                self.increases[h] += 1;
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let h = self.grid.len();
        let lens = [self.master.dimension(), self.bases.len(), self.master_rates.len(), self.thresholds.len(), self.increases.len()];
        if let Some(&bad) = lens.iter().find(|&&l| l != h) {
            return Err(Error::DimensionMismatch { expected: h, got: bad });
        }
        if let Some(b) = self.bases.iter().find(|b| b.dimension() != self.arms) {
            return Err(Error::DimensionMismatch { expected: self.arms, got: b.dimension() });
        }
        Ok(())
    }
}

/// Adaptive master-base OMD with a log-barrier master and variance thresholds.
#[derive(Clone, Debug)]
pub struct AdaptiveMasterBaseOmd {
    state: Alg2State,
    master_domain: ClippedSimplex,
    base_domain: ClippedSimplex,
    scratch_master: Vec<f64>,
    scratch_arms: Vec<f64>,
}

impl AdaptiveMasterBaseOmd {
    pub fn new(horizon: usize, arms: usize) -> Result<Self> {
        Self::from_state(Alg2State::init(horizon, arms)?)
    }

    pub fn with_options(horizon: usize, arms: usize, options: AlgorithmOptions) -> Result<Self> {
        Self::from_state(Alg2State::init_with(horizon, arms, options)?)
    }

    pub fn from_state(state: Alg2State) -> Result<Self> {
        state.validate()?;
        Ok(Self {
            master_domain: ClippedSimplex::new(state.grid.len(), state.alpha)?,
            base_domain: ClippedSimplex::new(state.arms, state.beta)?,
            scratch_master: vec![0.0; state.grid.len()],
            scratch_arms: vec![0.0; state.arms],
            state,
        })
    }

    pub fn state(&self) -> &Alg2State {
        &self.state
    }

    pub fn into_state(self) -> Alg2State {
        self.state
    }
}

impl BanditAlgorithm for AdaptiveMasterBaseOmd {
    fn name(&self) -> &'static str {
        "alg2"
    }

    fn num_arms(&self) -> usize {
        self.state.arms
    }

    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step> {
        let num_bases = self.state.grid.len();
        let base = self.state.master.sample(rng);
        let arm = self.state.bases[base].sample(rng);
        let loss = query_loss(self.state.round + 1, arm, loss_query)?;
        let st = &self.state;
        let fb = FeedbackRecord::new(base, arm, loss, st.master.get(base), st.bases[base].get(arm))?;

        // Master: log-barrier step with the pre-update rates xi_t.
        let master_loss = master_estimate(&fb, num_bases, st.alpha)?;
        let next_master = if master_loss.is_zero() {
            st.master.clone()
        } else {
            master_loss.write_dense(&mut self.scratch_master);
            let params = LogBarrierStepParams::new(st.master_rates.clone(), self.master_domain)?.with_mode(st.clip_mode);
            logbarrier_step(&st.master, &self.scratch_master, &params)?
        };

        // Bases: entropy step at eta_t(h), i.e. with the pre-update threshold.
        let mut next_bases = Vec::new();
        for h in 0..num_bases {
            let est = base_arm_estimate(&fb, h, st.arms, st.alpha, st.beta)?;
            if est.is_zero() {
                continue;
            }
            est.write_dense(&mut self.scratch_arms);
            let params = EntropyStepParams::new(st.base_rate(h), self.base_domain)?.with_mode(st.clip_mode);
            next_bases.push((h, entropy_step(&st.bases[h], &self.scratch_arms, &params)?));
        }

        let st = &mut self.state;
        st.master = next_master;
        for (h, dist) in next_bases {
            st.bases[h] = dist;
        }

        st.apply_threshold_rule();
        st.round += 1;
        Ok(Step { base: Some(base), arm, loss, feedback: Some(fb) })
    }

    fn instrument(&self) -> Option<InstrumentSample> {
        Some(InstrumentSample {
            master_probs: self.state.master.weights().to_vec(),
            thresholds: Some(self.state.thresholds.clone()),
            master_rates: Some(self.state.master_rates.clone()),
            base_rates: self.state.base_rates(),
        })
    }
}
