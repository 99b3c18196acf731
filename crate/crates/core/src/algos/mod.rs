//! Sequential decision algorithms behind one step interface.
//!
//! Every algorithm draws an arm, queries the (oblivious) environment for the
//! loss of that arm only, and updates its state. Randomness comes exclusively
//! from the `rng` passed to [`BanditAlgorithm::step`].

mod adaptive;
mod baselines;
mod master_base;

pub use adaptive::{AdaptiveMasterBaseOmd, Alg2State};
pub use baselines::{BaselineState, Exp3, Exp3S, UniformPolicy};
pub use master_base::{Alg1State, MasterBaseOmd};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::FeedbackRecord;
use crate::grid::LogBase;
use crate::simplex::ClipMode;

/// Outcome of one round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    /// Sampled base, for master-base algorithms.
    pub base: Option<usize>,
    pub arm: usize,
    pub loss: f64,
    pub feedback: Option<FeedbackRecord>,
}

/// Per-round view of learning-rate state, for instrumented runs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InstrumentSample {
    pub master_probs: Vec<f64>,
    pub thresholds: Option<Vec<f64>>,
    pub master_rates: Option<Vec<f64>>,
    pub base_rates: Vec<f64>,
}

pub trait BanditAlgorithm: Send {
    fn name(&self) -> &'static str;

    fn num_arms(&self) -> usize;

    /// Plays one round. `loss_query` is called exactly once, with the chosen arm.
    fn step(&mut self, rng: &mut dyn RngCore, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<Step>;

    fn instrument(&self) -> Option<InstrumentSample> {
        None
    }
}

/// Identifier accepted by the experiment runner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmId {
    Alg1,
    Alg2,
    Exp3,
    Exp3s,
    Uniform,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 5] =
        [AlgorithmId::Alg1, AlgorithmId::Alg2, AlgorithmId::Exp3, AlgorithmId::Exp3s, AlgorithmId::Uniform];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Alg1 => "alg1",
            AlgorithmId::Alg2 => "alg2",
            AlgorithmId::Exp3 => "exp3",
            AlgorithmId::Exp3s => "exp3s",
            AlgorithmId::Uniform => "uniform",
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::config("algorithm", format!("unknown algorithm id `{s}` (expected alg1|alg2|exp3|exp3s|uniform)")))
    }
}

/// Knobs shared by the master-base algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmOptions {
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub clip_mode: ClipMode,
}

/// Builds a fresh algorithm instance. `switches` is only used by EXP3.S (known-S tuning).
pub fn build_algorithm(
    id: AlgorithmId,
    horizon: usize,
    arms: usize,
    switches: usize,
    options: AlgorithmOptions,
) -> Result<Box<dyn BanditAlgorithm>> {
    Ok(match id {
        AlgorithmId::Alg1 => Box::new(MasterBaseOmd::with_options(horizon, arms, options)?),
        AlgorithmId::Alg2 => Box::new(AdaptiveMasterBaseOmd::with_options(horizon, arms, options)?),
        AlgorithmId::Exp3 => Box::new(Exp3::new(horizon, arms)?),
        AlgorithmId::Exp3s => Box::new(Exp3S::new(horizon, arms, switches)?),
        AlgorithmId::Uniform => Box::new(UniformPolicy::new(arms)?),
    })
}

pub(crate) fn query_loss(t: usize, arm: usize, loss_query: &mut dyn FnMut(usize) -> f64) -> Result<f64> {
    let loss = loss_query(arm);
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::LossOutOfRange { t, arm, loss });
    }
    Ok(loss)
}

pub(crate) fn check_shape(horizon: usize, arms: usize) -> Result<()> {
    if horizon < 2 {
        return Err(Error::HorizonTooSmall(horizon));
    }
    if arms < 2 {
        return Err(Error::InvalidParameter { name: "K", reason: format!("need at least 2 arms, got {arms}") });
    }
    Ok(())
}
