use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_shape, query_loss, AlgorithmOptions, BanditAlgorithm, InstrumentSample, Step};
use crate::error::{Error, Result};
use crate::estimators::{base_arm_estimate, master_estimate, FeedbackRecord};
use crate::grid::CandidateGrid;
use crate::omd::{entropy_step, EntropyStepParams};
use crate::simplex::{ClipMode, ClippedSimplex, Distribution};

/// Full state of the master-base learner with negative-entropy master and bases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alg1State {
    pub horizon: usize,
    pub arms: usize,
    pub grid: CandidateGrid,
    /// Master floor.
    pub alpha: f64,
    /// Base floor.
    pub beta: f64,
    /// Master learning rate.
    pub eta: f64,
    /// `eta(h) = sqrt(h) / (K^{1/3} T^{2/3})`, one per base.
    pub base_rates: Vec<f64>,
    pub master: Distribution,
    pub bases: Vec<Distribution>,
    pub clip_mode: ClipMode,
    /// Rounds played so far.
    pub round: usize,
}

impl Alg1State {
    pub fn init(horizon: usize, arms: usize) -> Result<Self> {
        Self::init_with(horizon, arms, AlgorithmOptions::default())
    }

    pub fn init_with(horizon: usize, arms: usize, options: AlgorithmOptions) -> Result<Self> {
        check_shape(horizon, arms)?;
        let grid = CandidateGrid::build_with_base(horizon, options.log_base)?;
        let mut state = Self::init_with_grid(arms, grid)?;
        state.clip_mode = options.clip_mode;
        Ok(state)
    }

    /// Initialization block with an explicit candidate grid.
    pub fn init_with_grid(arms: usize, grid: CandidateGrid) -> Result<Self> {
        let horizon = grid.horizon();
        check_shape(horizon, arms)?;
        let t = horizon as f64;
        let k = arms as f64;
        let h = grid.len() as f64;
        let alpha = k.cbrt() / (t.cbrt() * h.sqrt());
        let beta = 1.0 / (k * t);
        if alpha * h > 1.0 {
            return Err(Error::InfeasibleParameters(format!(
                "master floor alpha = {alpha:.6} times H = {} exceeds 1 (T = {horizon}, K = {arms})",
                grid.len()
            )));
        }
        let eta = 1.0 / (t * k).sqrt();
        let base_rates = grid.values().iter().map(|hv| hv.sqrt() / (k.cbrt() * t.powf(2.0 / 3.0))).collect();
        Ok(Self {
            horizon,
            arms,
            alpha,
            beta,
            eta,
            base_rates,
            master: Distribution::uniform(grid.len())?,
            bases: vec![Distribution::uniform(arms)?; grid.len()],
            grid,
            clip_mode: ClipMode::Project,
            round: 0,
        })
    }

    fn validate(&self) -> Result<()> {
        let h = self.grid.len();
        if self.master.dimension() != h || self.bases.len() != h || self.base_rates.len() != h {
            return Err(Error::DimensionMismatch { expected: h, got: self.master.dimension() });
        }
        if let Some(b) = self.bases.iter().find(|b| b.dimension() != self.arms) {
            return Err(Error::DimensionMismatch { expected: self.arms, got: b.dimension() });
        }
        Ok(())
    }
}

/// Master-base OMD: the master picks a base with exponential weights over the
/// clipped simplex `[alpha, 1]^H`, the base picks an arm with exponential weights
/// over `[beta, 1]^K` at its own rate `eta(h)`.
#[derive(Clone, Debug)]
pub struct MasterBaseOmd {
    state: Alg1State,
    master_params: EntropyStepParams,
    base_params: Vec<EntropyStepParams>,
    scratch_master: Vec<f64>,
    scratch_arms: Vec<f64>,
}

impl MasterBaseOmd {
    pub fn new(horizon: usize, arms: usize) -> Result<Self> {
        Self::from_state(Alg1State::init(horizon, arms)?)
    }

    pub fn with_options(horizon: usize, arms: usize, options: AlgorithmOptions) -> Result<Self> {
        Self::from_state(Alg1State::init_with(horizon, arms, options)?)
    }

    pub fn from_state(state: Alg1State) -> Result<Self> {
        state.validate()?;
        let master_domain = ClippedSimplex::new(state.grid.len(), state.alpha)?;
        let base_domain = ClippedSimplex::new(state.arms, state.beta)?;
        let master_params = EntropyStepParams::new(state.eta, master_domain)?.with_mode(state.clip_mode);
        let base_params = state
            .base_rates
            .iter()
            .map(|&r| EntropyStepParams::new(r, base_domain).map(|p| p.with_mode(state.clip_mode)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scratch_master: vec![0.0; state.grid.len()],
            scratch_arms: vec![0.0; state.arms],
            master_params,
            base_params,
            state,
        })
    }

    pub fn state(&self) -> &Alg1State {
        &self.state
    }

    pub fn into_state(self) -> Alg1State {
        self.state
    }
}

impl BanditAlgorithm for MasterBaseOmd {
    fn name(&self) -> &'static str {
        "alg1"
    }

    fn num_arms(&self) -> usize {
        self.state.arms
    }

    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step> {
        let st = &mut self.state;
        let num_bases = st.grid.len();
        let base = st.master.sample(rng);
        let arm = st.bases[base].sample(rng);
        let loss = query_loss(st.round + 1, arm, loss_query)?;
        let fb = FeedbackRecord::new(base, arm, loss, st.master.get(base), st.bases[base].get(arm))?;

        let master_loss = master_estimate(&fb, num_bases, st.alpha)?;
        if !master_loss.is_zero() {
            master_loss.write_dense(&mut self.scratch_master);
            st.master = entropy_step(&st.master, &self.scratch_master, &self.master_params)?;
        }

        // Every base is updated; all but the sampled one see a zero estimate,
        // and a zero-loss step leaves a feasible point where it is.
        for h in 0..num_bases {
            let est = base_arm_estimate(&fb, h, st.arms, st.alpha, st.beta)?;
            if est.is_zero() {
                continue;
            }
            est.write_dense(&mut self.scratch_arms);
            st.bases[h] = entropy_step(&st.bases[h], &self.scratch_arms, &self.base_params[h])?;
        }
        st.round += 1;
        Ok(Step { base: Some(base), arm, loss, feedback: Some(fb) })
    }

    fn instrument(&self) -> Option<InstrumentSample> {
        Some(InstrumentSample {
            master_probs: self.state.master.weights().to_vec(),
            thresholds: None,
            master_rates: None,
            base_rates: self.state.base_rates.clone(),
        })
    }
}
