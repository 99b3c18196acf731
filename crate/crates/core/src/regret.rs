//! Exact S-switch comparator and regret reports.
//!
//! The comparator is the cheapest action sequence with at most `S` changes.
//! With `D_t(a, s)` the cheapest prefix ending in arm `a` using at most `s`
//! switches,
//!
//! ```text
//! D_t(a, s) = l_t(a) + min(D_{t-1}(a, s), min_{b != a} D_{t-1}(b, s - 1))
//! ```
//!
//! and the inner minimum over `b != a` comes from the two smallest entries of
//! the previous row, so each round costs `O(K S)`.

use serde::{Deserialize, Serialize};

use crate::env::{LossMatrix, SwitchSchedule};
use crate::error::{Error, Result};
use crate::record::RunRecord;

/// Guard for [`brute_force_s_switch_loss`].
pub const MAX_BRUTE_FORCE_SEQUENCES: f64 = 1e7;

/// Result of the comparator dynamic program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparator {
    pub loss: f64,
    pub schedule: SwitchSchedule,
    /// Switch budget actually used (requested `S` clamped to `T - 1`).
    pub switches: usize,
    /// True when the requested `S` exceeded `T - 1`.
    pub clamped: bool,
    /// `prefix[t - 1]` is the comparator loss over rounds `1..=t`.
    pub prefix: Vec<f64>,
}

/// Smallest entry (lowest index on ties) and the smallest entry at any other index.
fn two_minima(row: &[f64]) -> ((f64, usize), (f64, usize)) {
    let mut first = (f64::INFINITY, usize::MAX);
    let mut second = (f64::INFINITY, usize::MAX);
    for (i, &v) in row.iter().enumerate() {
        if v < first.0 {
            second = first;
            first = (v, i);
        } else if v < second.0 {
            second = (v, i);
        }
    }
    (first, second)
}

/// Minimal total loss over sequences with at most `switches` changes, plus one minimizer.
///
/// Ties prefer the lower arm index (final arm and every predecessor).
pub fn best_s_switch_loss(matrix: &LossMatrix, switches: usize) -> Comparator {
    let horizon = matrix.horizon();
    let k = matrix.arms();
    let clamped = switches > horizon - 1;
    let s_max = switches.min(horizon - 1);

    if s_max == horizon - 1 {
        // Unrestricted: follow the per-step minimum.
        let seq = matrix.argmin_sequence();
        let mut prefix = Vec::with_capacity(horizon);
        let mut acc = 0.0;
        for (t, &a) in seq.iter().enumerate() {
            acc += matrix.loss(t + 1, a);
            prefix.push(acc);
        }
        // A prefix of length t with at most T-1 >= t-1 switches is also unrestricted.
        return Comparator { loss: acc, schedule: SwitchSchedule::from_sequence(&seq), switches: s_max, clamped, prefix };
    }

    let width = s_max + 1;
    // value[a * width + s]
    let mut value: Vec<f64> = (0..k).flat_map(|a| std::iter::repeat_n(matrix.loss(1, a), width)).collect();
    let mut next = vec![0.0; k * width];
    // Predecessor arm for (t, a, s), t >= 2.
    let mut pred: Vec<u32> = Vec::with_capacity((horizon - 1) * k * width);
    let mut column = vec![0.0; k];
    let mut prefix = Vec::with_capacity(horizon);
    prefix.push((0..k).map(|a| value[a * width + s_max]).fold(f64::INFINITY, f64::min));

    for t in 2..=horizon {
        let row = matrix.row(t);
        let base = pred.len();
        pred.resize(base + k * width, 0);
        for s in 0..width {
            let minima = if s > 0 {
                for (b, c) in column.iter_mut().enumerate() {
                    *c = value[b * width + s - 1];
                }
                Some(two_minima(&column))
            } else {
                None
            };
            for a in 0..k {
                let stay = (value[a * width + s], a);
                let best = match minima {
                    Some((first, second)) => {
                        let switch = if first.1 != a { first } else { second };
                        if switch.0 < stay.0 || (switch.0 == stay.0 && switch.1 < stay.1) {
                            switch
                        } else {
                            stay
                        }
                    }
                    None => stay,
                };
                next[a * width + s] = row[a] + best.0;
                pred[base + a * width + s] = best.1 as u32;
            }
        }
        std::mem::swap(&mut value, &mut next);
        prefix.push((0..k).map(|a| value[a * width + s_max]).fold(f64::INFINITY, f64::min));
    }

    let (mut arm, loss) = (0..k)
        .map(|a| (a, value[a * width + s_max]))
        .fold((0, f64::INFINITY), |best, (a, v)| if v < best.1 { (a, v) } else { best });
    let mut s = s_max;
    let mut seq = vec![0usize; horizon];
    seq[horizon - 1] = arm;
    for t in (2..=horizon).rev() {
        let p = pred[(t - 2) * k * width + arm * width + s] as usize;
        if p != arm {
            s -= 1;
        }
        arm = p;
        seq[t - 2] = arm;
    }
    Comparator { loss, schedule: SwitchSchedule::from_sequence(&seq), switches: s_max, clamped, prefix }
}

/// Exhaustive minimum over all `K^T` sequences with at most `switches` changes.
pub fn brute_force_s_switch_loss(matrix: &LossMatrix, switches: usize) -> Result<f64> {
    let horizon = matrix.horizon();
    let k = matrix.arms();
    let count = (k as f64).powi(horizon as i32);
    if count > MAX_BRUTE_FORCE_SEQUENCES {
        return Err(Error::InstanceTooLarge(count));
    }
    fn walk(m: &LossMatrix, t: usize, prev: usize, used: usize, budget: usize, acc: f64, best: &mut f64) {
        if t > m.horizon() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for a in 0..m.arms() {
            let used = used + usize::from(a != prev);
            if used <= budget {
                walk(m, t + 1, a, used, budget, m.loss(t, a) + acc, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    for a in 0..k {
        walk(matrix, 2, a, 0, switches, matrix.loss(1, a), &mut best);
    }
    Ok(best)
}

/// Total loss of a fixed sequence (index 0 is t = 1).
pub fn sequence_loss(matrix: &LossMatrix, sequence: &[usize]) -> f64 {
    sequence.iter().enumerate().fold(0.0, |acc, (t, &a)| matrix.loss(t + 1, a) + acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedTotal {
    pub seed: u64,
    pub total_loss: f64,
}

/// Monte Carlo estimate of the S-switch regret over a set of seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub algorithm: String,
    pub horizon: usize,
    pub arms: usize,
    pub switches: usize,
    pub switches_clamped: bool,
    pub per_seed: Vec<SeedTotal>,
    pub mean_loss: f64,
    /// Standard error of `mean_loss` (and hence of `regret`).
    pub std_error: f64,
    pub comparator_loss: f64,
    pub comparator_schedule: SwitchSchedule,
    pub regret: f64,
    /// `regret_curve[t - 1]`: seed-mean cumulative loss through `t` minus the prefix comparator.
    pub regret_curve: Vec<f64>,
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`; zero for one sample).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn evaluate(traces: &[RunRecord], matrix: &LossMatrix, switches: usize) -> Result<RegretReport> {
    let comparator = best_s_switch_loss(matrix, switches);
    evaluate_with_comparator(traces, matrix, &comparator)
}

pub fn evaluate_with_comparator(traces: &[RunRecord], matrix: &LossMatrix, comparator: &Comparator) -> Result<RegretReport> {
    let first = traces.first().ok_or_else(|| Error::TraceMismatch("no traces to evaluate".into()))?;
    for tr in traces {
        if tr.horizon() != matrix.horizon() {
            return Err(Error::TraceMismatch(format!(
                "seed {} has {} steps, table has {}",
                tr.seed,
                tr.horizon(),
                matrix.horizon()
            )));
        }
        if tr.algorithm != first.algorithm {
            return Err(Error::TraceMismatch("traces mix algorithms".into()));
        }
        if let Some(s) = tr.steps.iter().find(|s| s.arm >= matrix.arms()) {
            return Err(Error::TraceMismatch(format!("arm {} at t = {} out of range", s.arm, s.t)));
        }
    }
    let totals: Vec<f64> = traces.iter().map(RunRecord::total_loss).collect();
    let (mean_loss, std_error) = mean_and_std_error(&totals);

    let n = traces.len() as f64;
    let mut cumulative = vec![0.0; matrix.horizon()];
    for tr in traces {
        let mut acc = 0.0;
        for (c, s) in cumulative.iter_mut().zip(&tr.steps) {
            acc += s.loss;
            *c += acc;
        }
    }
    let regret_curve = cumulative.iter().zip(&comparator.prefix).map(|(c, p)| c / n - p).collect();

    Ok(RegretReport {
        algorithm: first.algorithm.clone(),
        horizon: matrix.horizon(),
        arms: matrix.arms(),
        switches: comparator.switches,
        switches_clamped: comparator.clamped,
        per_seed: traces.iter().zip(&totals).map(|(t, &l)| SeedTotal { seed: t.seed, total_loss: l }).collect(),
        mean_loss,
        std_error,
        comparator_loss: comparator.loss,
        comparator_schedule: comparator.schedule.clone(),
        regret: mean_loss - comparator.loss,
        regret_curve,
    })
}
