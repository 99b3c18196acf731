//! One-step online mirror descent kernels.
//!
//! Each kernel takes the unconstrained mirror step for its regularizer and then
//! enforces the clipped domain, either by exact Bregman projection or by uniform
//! mixing (see [`ClipMode`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{mix_uniform, project_entropy, project_logbarrier, ClipMode, ClippedSimplex, Distribution};

/// Parameters of a negative-entropy step: scalar learning rate and target domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyStepParams {
    learning_rate: f64,
    pub domain: ClippedSimplex,
    pub mode: ClipMode,
}

impl EntropyStepParams {
    pub fn new(learning_rate: f64, domain: ClippedSimplex) -> Result<Self> {
        if !(learning_rate > 0.0) || !learning_rate.is_finite() {
            return Err(Error::InvalidParameter {
                name: "learning_rate",
                reason: format!("{learning_rate} is not a positive finite number"),
            });
        }
        Ok(Self { learning_rate, domain, mode: ClipMode::Project })
    }

    pub fn with_mode(mut self, mode: ClipMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
}

/// Parameters of a log-barrier step: one learning rate per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBarrierStepParams {
    rates: Vec<f64>,
    pub domain: ClippedSimplex,
    pub mode: ClipMode,
}

impl LogBarrierStepParams {
    pub fn new(rates: Vec<f64>, domain: ClippedSimplex) -> Result<Self> {
        if rates.len() != domain.dimension() {
            return Err(Error::DimensionMismatch { expected: domain.dimension(), got: rates.len() });
        }
        if let Some(i) = rates.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParameter { name: "rates", reason: format!("rate {i} = {} is not positive", rates[i]) });
        }
        Ok(Self { rates, domain, mode: ClipMode::Project })
    }

    pub fn with_mode(mut self, mode: ClipMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
}

fn check_loss(loss: &[f64], expected: usize) -> Result<()> {
    if loss.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: loss.len() });
    }
    if let Some(index) = loss.iter().position(|l| !l.is_finite()) {
        return Err(Error::EstimatorOverflow { index });
    }
    if let Some(i) = loss.iter().position(|l| *l < 0.0) {
        return Err(Error::InvalidParameter { name: "loss_estimate", reason: format!("entry {i} = {} is negative", loss[i]) });
    }
    Ok(())
}

fn check_current(current: &Distribution) -> Result<()> {
    if current.weights().iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidDistribution("OMD step requires a strictly positive current point".into()));
    }
    Ok(())
}

/// Exponential-weights step `p~_i = p_i exp(-eta l_i)` followed by the clip.
///
/// The unconstrained point is formed in log space and shifted by its maximum,
/// so estimator magnitudes far beyond `ln(f64::MAX) / eta` are harmless.
pub fn entropy_step(current: &Distribution, loss_estimate: &[f64], params: &EntropyStepParams) -> Result<Distribution> {
    check_loss(loss_estimate, current.dimension())?;
    check_current(current)?;
    let eta = params.learning_rate;
    let mut logits: Vec<f64> = current
        .weights()
        .iter()
        .zip(loss_estimate)
        .map(|(&p, &l)| p.ln() - eta * l)
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::EstimatorOverflow { index: 0 });
    }
    logits.iter_mut().for_each(|x| *x = (*x - max).exp());
    match params.mode {
        ClipMode::Project => project_entropy(&logits, &params.domain),
        ClipMode::Mix => mix_uniform(&logits, &params.domain),
    }
}

/// Log-barrier step in inverse coordinates, `1/p~_i = 1/p_i + xi_i l_i`, followed by the clip.
pub fn logbarrier_step(current: &Distribution, loss_estimate: &[f64], params: &LogBarrierStepParams) -> Result<Distribution> {
    check_loss(loss_estimate, current.dimension())?;
    check_current(current)?;
    let inverse: Vec<f64> = current
        .weights()
        .iter()
        .zip(loss_estimate)
        .zip(&params.rates)
        .map(|((&p, &l), &xi)| 1.0 / p + xi * l)
        .collect();
    if let Some(index) = inverse.iter().position(|v| !v.is_finite()) {
        return Err(Error::EstimatorOverflow { index });
    }
    match params.mode {
        ClipMode::Project => project_logbarrier(&inverse, &params.rates, &params.domain),
        ClipMode::Mix => {
            let unclipped = project_logbarrier(&inverse, &params.rates, &ClippedSimplex::unclipped(current.dimension())?)?;
            mix_uniform(unclipped.weights(), &params.domain)
        }
    }
}
