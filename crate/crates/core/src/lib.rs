//! Switching-regret bandits via master-base online mirror descent.
//!
//! The crate covers clipped-simplex projections, the entropic and log-barrier
//! OMD kernels, importance-weighted estimators, the two master-base learners and
//! their baselines, synthetic environments, an exact S-switch comparator, and a
//! reproducible experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algos;
pub mod env;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod harness;
pub mod omd;
pub mod record;
pub mod regret;
pub mod simplex;

pub use algos::{
    build_algorithm, AdaptiveMasterBaseOmd, Alg1State, Alg2State, AlgorithmId, AlgorithmOptions, BanditAlgorithm,
    BaselineState, Exp3, Exp3S, InstrumentSample, MasterBaseOmd, Step, UniformPolicy,
};
pub use env::{
    gen_deterministic_adversarial, gen_piecewise_bernoulli, load_loss_matrix, loss_matrix_from_csv, loss_matrix_to_csv,
    save_loss_matrix, EnvMetadata, LossMatrix, Pattern, SegmentLayout, SwitchSchedule,
};
pub use error::{Error, Result};
pub use estimators::{base_arm_estimate, master_estimate, FeedbackRecord, SparseEstimate};
pub use grid::{CandidateGrid, LogBase};
pub use harness::{
    derive_seed, fit_power_law, run_experiment, run_scaling_study, EnvSpec, ExperimentConfig, ExperimentOutcome,
    PowerLawFit, ScalingStudy,
};
pub use omd::{entropy_step, logbarrier_step, EntropyStepParams, LogBarrierStepParams};
pub use record::{Instrumentation, RunRecord, StepRecord};
pub use regret::{best_s_switch_loss, brute_force_s_switch_loss, evaluate, Comparator, RegretReport};
pub use simplex::{
    mix_uniform, project_entropy, project_logbarrier, ClipMode, ClippedSimplex, Distribution, LogBarrierProjection,
};
