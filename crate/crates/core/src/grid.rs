//! Geometric grid of switch-count guesses, one per base learner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base of the logarithm in `ceil(log T)` and `gamma = exp(1 / log T)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "e" => Ok(LogBase::Natural),
            "two" | "2" => Ok(LogBase::Two),
            "ten" | "10" => Ok(LogBase::Ten),
            other => Err(Error::config("log_base", format!("unknown base `{other}` (expected natural|two|ten)"))),
        }
    }
}

/// `{T^0, T^{1/m}, ..., T^{m/m}}` with `m = ceil(log T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid {
    horizon: usize,
    values: Vec<f64>,
}

impl CandidateGrid {
    pub fn build(horizon: usize) -> Result<Self> {
        Self::build_with_base(horizon, LogBase::Natural)
    }

    pub fn build_with_base(horizon: usize, base: LogBase) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::HorizonTooSmall(horizon));
        }
        let t = horizon as f64;
        let steps = base.log(t).ceil().max(1.0) as usize;
        let mut values: Vec<f64> = (0..=steps).map(|i| t.powf(i as f64 / steps as f64)).collect();
        values[0] = 1.0;
        values[steps] = t;
        Ok(Self { horizon, values })
    }

    /// An explicit grid, e.g. a single base. Values must be positive and strictly increasing.
    pub fn from_values(horizon: usize, values: Vec<f64>) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::HorizonTooSmall(horizon));
        }
        if values.is_empty() || values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter { name: "grid", reason: "values must be positive and finite".into() });
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter { name: "grid", reason: "values must be strictly increasing".into() });
        }
        Ok(Self { horizon, values })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index and value of the largest grid point `<= switches`, if any.
    pub fn h_dagger(&self, switches: f64) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .take_while(|&(_, h)| h <= switches)
            .last()
    }
}
