//! Oblivious adversarial environments.
//!
//! Every generator materializes the full `T x K` loss table up front; the
//! learner only ever reads from it. Randomness is consumed at construction only.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance of a loss table, persisted next to the CSV as JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnvMetadata {
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub horizon: usize,
    #[serde(default)]
    pub arms: usize,
    /// Declared switch schedule, when the generator knows it.
    #[serde(default)]
    pub schedule: Option<SwitchSchedule>,
}

/// Piecewise-constant arm sequence: segment `i` starts at `starts[i]` (1-based) and plays `arms[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchSchedule {
    pub starts: Vec<usize>,
    pub arms: Vec<usize>,
}

impl SwitchSchedule {
    pub fn new(starts: Vec<usize>, arms: Vec<usize>) -> Result<Self> {
        if starts.is_empty() || starts.len() != arms.len() || starts[0] != 1 {
            return Err(Error::InvalidParameter { name: "schedule", reason: "segments must start at t = 1, one arm per segment".into() });
        }
        if starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter { name: "schedule", reason: "segment starts must be strictly increasing".into() });
        }
        Ok(Self { starts, arms })
    }

    /// Compresses a per-step arm sequence (index 0 is t = 1) into segments.
    pub fn from_sequence(sequence: &[usize]) -> Self {
        let mut starts = Vec::new();
        let mut arms = Vec::new();
        for (i, &a) in sequence.iter().enumerate() {
            if arms.last() != Some(&a) {
                starts.push(i + 1);
                arms.push(a);
            }
        }
        Self { starts, arms }
    }

    pub fn num_switches(&self) -> usize {
        self.arms.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn to_sequence(&self, horizon: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(horizon);
        for (i, &arm) in self.arms.iter().enumerate() {
            let end = self.starts.get(i + 1).map_or(horizon + 1, |&s| s.min(horizon + 1));
            for _ in self.starts[i]..end {
                out.push(arm);
            }
        }
        out
    }

    /// Segment lengths given the horizon.
    pub fn lengths(&self, horizon: usize) -> Vec<usize> {
        self.starts
            .iter()
            .enumerate()
            .map(|(i, &s)| self.starts.get(i + 1).copied().unwrap_or(horizon + 1) - s)
            .collect()
    }
}

/// The full loss table `l_t(a)`, row-major over time.
#[derive(Clone, Debug, PartialEq)]
pub struct LossMatrix {
    horizon: usize,
    arms: usize,
    losses: Vec<f64>,
    pub metadata: EnvMetadata,
}

impl LossMatrix {
    /// `rows[t][a]`, every entry in `[0, 1]`.
    pub fn from_rows(rows: Vec<Vec<f64>>, metadata: EnvMetadata) -> Result<Self> {
        let horizon = rows.len();
        let arms = rows.first().map_or(0, Vec::len);
        if horizon == 0 || arms == 0 {
            return Err(Error::InvalidParameter { name: "losses", reason: "loss table must be non-empty".into() });
        }
        let mut losses = Vec::with_capacity(horizon * arms);
        for (t, row) in rows.into_iter().enumerate() {
            if row.len() != arms {
                return Err(Error::ShapeMismatch { what: "arms in row", expected: arms, got: row.len() });
            }
            for (a, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::LossOutOfRange { t: t + 1, arm: a, loss: v });
                }
            }
            losses.extend(row);
        }
        let mut metadata = metadata;
        metadata.horizon = horizon;
        metadata.arms = arms;
        Ok(Self { horizon, arms, losses, metadata })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    /// Loss of `arm` at 1-based time `t`.
    pub fn loss(&self, t: usize, arm: usize) -> f64 {
        self.losses[(t - 1) * self.arms + arm]
    }

    /// Row at 1-based time `t`.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.losses[(t - 1) * self.arms..t * self.arms]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.losses.chunks_exact(self.arms)
    }

    /// Sum of `arm`'s losses over the whole horizon.
    pub fn arm_total(&self, arm: usize) -> f64 {
        self.rows().map(|r| r[arm]).sum()
    }

    /// Per-step argmin arm, lowest index on ties.
    pub fn argmin_sequence(&self) -> Vec<usize> {
        self.rows()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best })
                    .0
            })
            .collect()
    }

    /// Number of changes in the per-step argmin arm.
    pub fn realized_argmin_switches(&self) -> usize {
        self.argmin_sequence().windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// How segment lengths are laid out over the horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentLayout {
    /// Lengths differ by at most one.
    #[default]
    Equal,
    /// Lengths halve from one segment to the next (each at least one step).
    Geometric,
}

impl std::str::FromStr for SegmentLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(SegmentLayout::Equal),
            "geometric" => Ok(SegmentLayout::Geometric),
            other => Err(Error::config("layout", format!("unknown layout `{other}` (expected equal or geometric)"))),
        }
    }
}

/// Deterministic stress patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Segment `s` has best arm `s mod K` with loss 0; every other arm has loss 1.
    AlternatingPunisher,
    /// Segment `s` has best arm `s mod K` whose loss ramps from 0 to 1/2 across the
    /// segment; other arms ramp from 1/2 upward, further arms (cyclically) ramping faster.
    Sawtooth,
}

impl std::str::FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alternating-punisher" => Ok(Pattern::AlternatingPunisher),
            "sawtooth" => Ok(Pattern::Sawtooth),
            other => Err(Error::InvalidPattern(other.to_string())),
        }
    }
}

impl Pattern {
    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::AlternatingPunisher => "alternating-punisher",
            Pattern::Sawtooth => "sawtooth",
        }
    }
}

fn check_env_shape(horizon: usize, arms: usize, switches: usize) -> Result<()> {
    if horizon == 0 || arms == 0 {
        return Err(Error::InvalidParameter { name: "T/K", reason: "horizon and arm count must be positive".into() });
    }
    if switches >= horizon {
        return Err(Error::InvalidParameter { name: "S", reason: format!("S = {switches} must be < T = {horizon}") });
    }
    if switches > 0 && arms < 2 {
        return Err(Error::InvalidParameter { name: "K", reason: "switching environments need at least 2 arms".into() });
    }
    Ok(())
}

/// Segment start times (1-based) for `segments` segments over `horizon` steps.
pub fn segment_starts(horizon: usize, segments: usize, layout: SegmentLayout) -> Vec<usize> {
    let lengths: Vec<usize> = match layout {
        SegmentLayout::Equal => {
            let base = horizon / segments;
            let extra = horizon % segments;
            (0..segments).map(|i| base + usize::from(i < extra)).collect()
        }
        SegmentLayout::Geometric => {
            let weights: Vec<f64> = (0..segments).map(|i| 0.5f64.powi(i as i32)).collect();
            let total: f64 = weights.iter().sum();
            let mut lengths: Vec<usize> =
                weights.iter().map(|w| ((horizon as f64 * w / total).floor() as usize).max(1)).collect();
            let mut assigned: usize = lengths.iter().sum();
            while assigned > horizon {
                // shave the longest segment
                let i = (0..segments).max_by_key(|&i| (lengths[i], usize::MAX - i)).unwrap();
                lengths[i] -= 1;
                assigned -= 1;
            }
            lengths[0] += horizon - assigned;
            lengths
        }
    };
    let mut starts = Vec::with_capacity(segments);
    let mut t = 1;
    for len in lengths {
        starts.push(t);
        t += len;
    }
    starts
}

/// Piecewise-stationary Bernoulli losses with `S` switches of the best arm.
///
/// The best arm of each segment has mean loss `0.5 - gap/2`, all others `0.5 + gap/2`.
/// Consecutive segments always have different best arms.
pub fn gen_piecewise_bernoulli<R: Rng + ?Sized>(
    horizon: usize,
    arms: usize,
    switches: usize,
    gap: f64,
    layout: SegmentLayout,
    rng: &mut R,
) -> Result<LossMatrix> {
    check_env_shape(horizon, arms, switches)?;
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidParameter { name: "gap", reason: format!("{gap} is outside (0, 1]") });
    }
    let starts = segment_starts(horizon, switches + 1, layout);
    let mut best = Vec::with_capacity(starts.len());
    for _ in 0..starts.len() {
        let arm = match best.last() {
            None => rng.random_range(0..arms),
            Some(&prev) => {
                let a = rng.random_range(0..arms - 1);
                if a >= prev { a + 1 } else { a }
            }
        };
        best.push(arm);
    }
    let schedule = SwitchSchedule::new(starts, best)?;
    let sequence = schedule.to_sequence(horizon);
    let low = 0.5 - gap / 2.0;
    let high = 0.5 + gap / 2.0;
    let rows = sequence
        .iter()
        .map(|&b| {
            (0..arms)
                .map(|a| {
                    let mean = if a == b { low } else { high };
                    if rng.random::<f64>() < mean { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let mut parameters = BTreeMap::new();
    parameters.insert("S".into(), switches as f64);
    parameters.insert("gap".into(), gap);
    parameters.insert("geometric".into(), f64::from(u8::from(layout == SegmentLayout::Geometric)));
    LossMatrix::from_rows(
        rows,
        EnvMetadata { generator: "piecewise-bernoulli".into(), parameters, seed: None, horizon, arms, schedule: Some(schedule) },
    )
}

/// Deterministic tables with exactly `S` switches of the per-step best arm.
pub fn gen_deterministic_adversarial(horizon: usize, arms: usize, switches: usize, pattern: Pattern) -> Result<LossMatrix> {
    check_env_shape(horizon, arms, switches)?;
    let starts = segment_starts(horizon, switches + 1, SegmentLayout::Equal);
    let best: Vec<usize> = (0..starts.len()).map(|s| s % arms).collect();
    let schedule = SwitchSchedule::new(starts, best)?;
    let lengths = schedule.lengths(horizon);
    let mut rows = Vec::with_capacity(horizon);
    for (&b, &len) in schedule.arms.iter().zip(&lengths) {
        for step in 0..len {
            let u = step as f64 / len as f64;
            let row = (0..arms)
                .map(|a| match pattern {
                    Pattern::AlternatingPunisher => f64::from(u8::from(a != b)),
                    Pattern::Sawtooth => {
                        if a == b {
                            0.5 * u
                        } else {
                            let dist = ((a + arms - b) % arms) as f64 / (arms - 1).max(1) as f64;
                            0.5 + 0.5 * u * dist
                        }
                    }
                })
                .collect();
            rows.push(row);
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("S".into(), switches as f64);
    LossMatrix::from_rows(
        rows,
        EnvMetadata { generator: pattern.as_str().into(), parameters, seed: None, horizon, arms, schedule: Some(schedule) },
    )
}

/// Sidecar path for a CSV file: `x.csv` becomes `x.meta.json`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Renders the CSV form: header `t,a0,...,a{K-1}`, then one row per step (t from 1).
pub fn loss_matrix_to_csv(matrix: &LossMatrix) -> String {
    let mut out = String::with_capacity(matrix.horizon * (matrix.arms * 4 + 8));
    out.push('t');
    for a in 0..matrix.arms {
        out.push_str(&format!(",a{a}"));
    }
    out.push('\n');
    for (t, row) in matrix.rows().enumerate() {
        out.push_str(&(t + 1).to_string());
        for v in row {
            out.push(',');
            // shortest representation that round-trips
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV form. Rows/columns in errors are 1-based file lines and fields.
pub fn loss_matrix_from_csv(text: &str, expected: Option<(usize, usize)>) -> Result<LossMatrix> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::Parse { row: 1, column: 1, reason: e.to_string() })?,
        None => return Err(Error::Parse { row: 1, column: 1, reason: "empty file".into() }),
    };
    if header.get(0) != Some("t") {
        return Err(Error::Parse { row: 1, column: 1, reason: "header must start with `t`".into() });
    }
    let arms = header.len() - 1;
    if arms == 0 {
        return Err(Error::Parse { row: 1, column: 2, reason: "header names no arms".into() });
    }
    for (j, name) in header.iter().enumerate().skip(1) {
        if name != format!("a{}", j - 1) {
            return Err(Error::Parse { row: 1, column: j + 1, reason: format!("expected `a{}`, found `{name}`", j - 1) });
        }
    }
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse { row: line, column: 1, reason: e.to_string() })?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != arms + 1 {
            let column = record.len().min(arms + 1) + usize::from(record.len() < arms + 1);
            return Err(Error::Parse {
                row: line,
                column,
                reason: format!("expected {} fields, found {}", arms + 1, record.len()),
            });
        }
        let t: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { row: line, column: 1, reason: format!("bad time index `{}`", &record[0]) })?;
        if t != rows.len() + 1 {
            return Err(Error::Parse { row: line, column: 1, reason: format!("expected t = {}, found {t}", rows.len() + 1) });
        }
        let mut row = Vec::with_capacity(arms);
        for j in 1..=arms {
            let field = record[j].trim();
            let v: f64 =
                field.parse().map_err(|_| Error::Parse { row: line, column: j + 1, reason: format!("bad number `{field}`") })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::EntryOutOfRange { row: line, column: j + 1, value: v });
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { row: 2, column: 1, reason: "no data rows".into() });
    }
    if let Some((horizon, k)) = expected {
        if rows.len() != horizon {
            return Err(Error::ShapeMismatch { what: "time steps", expected: horizon, got: rows.len() });
        }
        if arms != k {
            return Err(Error::ShapeMismatch { what: "arms", expected: k, got: arms });
        }
    }
    LossMatrix::from_rows(rows, EnvMetadata { generator: "file".into(), ..EnvMetadata::default() })
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Writes the CSV table and its JSON metadata sidecar.
pub fn save_loss_matrix(matrix: &LossMatrix, path: &Path) -> Result<()> {
    let meta = serde_json::to_string_pretty(&matrix.metadata)?;
    write_atomic(path, loss_matrix_to_csv(matrix).as_bytes())?;
    write_atomic(&metadata_path(path), meta.as_bytes())
}

/// Reads a CSV table, plus its metadata sidecar when one exists.
pub fn load_loss_matrix(path: &Path) -> Result<LossMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let meta_path = metadata_path(path);
    let metadata: Option<EnvMetadata> = if meta_path.exists() {
        let raw = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        Some(serde_json::from_str(&raw)?)
    } else {
        None
    };
    let expected = metadata.as_ref().filter(|m| m.horizon > 0 && m.arms > 0).map(|m| (m.horizon, m.arms));
    let mut matrix = loss_matrix_from_csv(&text, expected)?;
    if let Some(meta) = metadata {
        matrix.metadata = meta;
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alternating_punisher_table() {
        let m = gen_deterministic_adversarial(4, 2, 1, Pattern::AlternatingPunisher).unwrap();
        let rows: Vec<Vec<f64>> = m.rows().map(<[f64]>::to_vec).collect();
        assert_eq!(rows, vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn sawtooth_switch_count() {
        let m = gen_deterministic_adversarial(12, 2, 3, Pattern::Sawtooth).unwrap();
        assert_eq!(m.realized_argmin_switches(), 3);
        assert!(m.rows().flatten().all(|&v| (0.0..=1.0).contains(&v)));
        let m = gen_deterministic_adversarial(1000, 5, 7, Pattern::Sawtooth).unwrap();
        assert_eq!(m.realized_argmin_switches(), 7);
        assert!(m.rows().flatten().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn invalid_pattern_name() {
        assert!(matches!("zigzag".parse::<Pattern>(), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn bernoulli_segments_and_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = gen_piecewise_bernoulli(103, 4, 4, 0.4, SegmentLayout::Equal, &mut rng).unwrap();
        let sched = m.metadata.schedule.clone().unwrap();
        assert_eq!(sched.num_switches(), 4);
        let lengths = sched.lengths(103);
        assert_eq!(lengths.iter().sum::<usize>(), 103);
        assert!(lengths.iter().max().unwrap() - lengths.iter().min().unwrap() <= 1);
        assert!(m.rows().flatten().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn bernoulli_gap_one_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = gen_piecewise_bernoulli(40, 3, 2, 1.0, SegmentLayout::Equal, &mut rng).unwrap();
        let sched = m.metadata.schedule.clone().unwrap();
        let seq = sched.to_sequence(40);
        let follow: f64 = seq.iter().enumerate().map(|(t, &a)| m.loss(t + 1, a)).sum();
        assert_eq!(follow, 0.0);
        assert_eq!(m.realized_argmin_switches(), 2);
    }

    #[test]
    fn bernoulli_expected_best_loss() {
        // S = 0: the best arm's loss sum concentrates at T (0.5 - gap/2).
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = 20_000;
        let m = gen_piecewise_bernoulli(t, 2, 0, 0.4, SegmentLayout::Equal, &mut rng).unwrap();
        let best = m.metadata.schedule.as_ref().unwrap().arms[0];
        let mean = 0.3;
        let se = (mean * (1.0 - mean) * t as f64).sqrt();
        assert!((m.arm_total(best) - t as f64 * mean).abs() < 4.0 * se);
    }

    #[test]
    fn geometric_layout() {
        let starts = segment_starts(100, 4, SegmentLayout::Geometric);
        assert_eq!(starts[0], 1);
        let sched = SwitchSchedule::new(starts, vec![0, 1, 0, 1]).unwrap();
        let lengths = sched.lengths(100);
        assert_eq!(lengths.iter().sum::<usize>(), 100);
        assert!(lengths.windows(2).all(|w| w[0] >= w[1]));
        let tight = segment_starts(5, 5, SegmentLayout::Geometric);
        assert_eq!(tight, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn generators_reject_bad_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(gen_piecewise_bernoulli(10, 2, 10, 0.5, SegmentLayout::Equal, &mut rng).is_err());
        assert!(gen_piecewise_bernoulli(10, 2, 1, 0.0, SegmentLayout::Equal, &mut rng).is_err());
        assert!(gen_deterministic_adversarial(10, 1, 2, Pattern::Sawtooth).is_err());
    }

    #[test]
    fn seed_reproducibility() {
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            gen_piecewise_bernoulli(500, 3, 3, 0.3, SegmentLayout::Equal, &mut rng).unwrap()
        };
        assert_eq!(gen(1), gen(1));
        assert_ne!(gen(1), gen(2));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let rows = vec![vec![0.1, 0.7], vec![1.0 / 3.0, 0.0]];
        let m = LossMatrix::from_rows(rows, EnvMetadata::default()).unwrap();
        let text = loss_matrix_to_csv(&m);
        assert!(text.starts_with("t,a0,a1\n1,0.1,0.7\n"));
        let back = loss_matrix_from_csv(&text, Some((2, 2))).unwrap();
        assert_eq!(back.rows().flatten().copied().collect::<Vec<_>>(), m.rows().flatten().copied().collect::<Vec<_>>());

        let err = loss_matrix_from_csv("t,a0,a1\n1,0.5,1.2\n", None).unwrap_err();
        assert!(matches!(err, Error::EntryOutOfRange { row: 2, column: 3, .. }), "{err}");
        let err = loss_matrix_from_csv("t,a0,a1\n1,0.5,0.2\n2,0.5\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, column: 3, .. }), "{err}");
        let err = loss_matrix_from_csv("t,a0\n1,abc\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, column: 2, .. }), "{err}");
        let err = loss_matrix_from_csv("t,a0\n1,0.5\n", Some((2, 1))).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }), "{err}");
    }

    #[test]
    fn schedule_sequence_round_trip() {
        let seq = vec![2, 2, 0, 0, 0, 1];
        let s = SwitchSchedule::from_sequence(&seq);
        assert_eq!(s.starts, vec![1, 3, 6]);
        assert_eq!(s.num_switches(), 2);
        assert_eq!(s.to_sequence(6), seq);
    }
}
