//! Seeded Monte Carlo experiments.
//!
//! Every trial derives its own seed from the master seed, the experiment
//! name and the trial index, and samples `g1` and `g2` from separate
//! streams of that seed. Searches inside a trial are single-threaded, so
//! node counts and outcomes are functions of the configuration alone;
//! trials run on a pool of `jobs` workers and are folded in index order.
//! Wall-clock times go to a separate `timings.csv` so that `trials.csv`
//! is byte-identical across reruns and worker counts.
//!
//! Trials that exhaust their budget are undecided. They are counted and
//! shown, but never enter a frequency's denominator.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hyperlcis_core::matcher::{Budget, Existence, NoClock};
use hyperlcis_core::moments::{expected_w, markov_tail, LogField};
use hyperlcis_core::theory::{self, PredictionReport};
use hyperlcis_core::{rng, Hypergraph, LcisStrategy};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::parallel::WallClock;

/// Node budget per search unless configured otherwise.
pub const DEFAULT_MAX_NODES: u64 = 200_000_000;

/// Largest order searched without any budget.
pub const UNBUDGETED_ORDER_LIMIT: usize = 16;

const G1_STREAM: u64 = 1;
const G2_STREAM: u64 = 2;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hyperlcis_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn config_error(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

/// Experiment parameters. Read from a flat TOML file; unset keys take the
/// defaults below, unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n1: usize,
    /// Order of `g2` for the concentration and audit runs.
    pub n2: usize,
    /// Inclusion scan range for `n2`; defaults to `d - 1 ..= n1`.
    pub n2_min: Option<usize>,
    pub n2_max: Option<usize>,
    /// Audit range for `ell`; defaults to `d - 1 ..= min(n1, n2)`.
    pub ell_min: Option<usize>,
    pub ell_max: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Nodes per search; 0 means no node limit.
    pub max_nodes: u64,
    /// Seconds per search. Makes outcomes depend on machine speed.
    pub max_seconds: Option<f64>,
    /// Window half-width for the prediction.
    pub epsilon: Option<f64>,
    /// Directory for `trials.csv`, `timings.csv` and `summary.json`.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 3,
            n1: 16,
            n2: 16,
            n2_min: None,
            n2_max: None,
            ell_min: None,
            ell_max: None,
            trials: 100,
            seed: 0,
            max_nodes: DEFAULT_MAX_NODES,
            max_seconds: None,
            epsilon: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), LabError> {
        if self.d < 2 {
            return Err(config_error("d must be at least 2"));
        }
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        if let Some(s) = self.max_seconds {
            if !(s > 0.0 && s.is_finite()) {
                return Err(config_error("max_seconds must be positive"));
            }
        }
        Ok(())
    }

    fn budgeted(&self) -> bool {
        self.max_nodes > 0 || self.max_seconds.is_some()
    }

    /// Refuses search sizes that are out of reach without a budget.
    fn check_feasible(&self, order: usize) -> Result<(), LabError> {
        if order > UNBUDGETED_ORDER_LIMIT && !self.budgeted() {
            return Err(config_error(format!(
                "searches on {order} vertices need max_nodes or max_seconds"
            )));
        }
        Ok(())
    }

    fn scan_range(&self) -> Result<(usize, usize), LabError> {
        let lo = self.n2_min.unwrap_or(self.d - 1);
        let hi = self.n2_max.unwrap_or(self.n1);
        if lo > hi {
            return Err(config_error("empty n2 range"));
        }
        if hi > self.n1 {
            return Err(config_error("n2_max exceeds n1"));
        }
        Ok((lo, hi))
    }

    fn ell_range(&self) -> Result<(usize, usize), LabError> {
        let top = self.n1.min(self.n2);
        let lo = self.ell_min.unwrap_or(self.d - 1);
        let hi = self.ell_max.unwrap_or(top);
        if lo > hi {
            return Err(config_error("empty ell range"));
        }
        if hi > top {
            return Err(config_error("ell_max exceeds min(n1, n2)"));
        }
        Ok((lo, hi))
    }
}

/// One search inside one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub trial: u64,
    pub seed: u64,
    pub d: usize,
    pub n1: usize,
    pub n2: usize,
    /// Size asked of a decision search; empty for LCIS searches.
    pub target: Option<usize>,
    /// Proved LCIS size; empty when undecided or not an LCIS search.
    pub lcis: Option<usize>,
    /// Size of the largest witness found.
    pub witness_size: usize,
    /// Decision outcome; empty when undecided or not a decision search.
    pub found: Option<bool>,
    pub undecided: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub experiment: String,
    pub trial: u64,
    pub n2: usize,
    pub target: Option<usize>,
    pub seconds: f64,
}

/// All records of one run, in trial order.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput<S> {
    pub records: Vec<TrialRecord>,
    pub timings: Vec<TimingRecord>,
    pub summary: S,
}

struct Searcher {
    max_nodes: Option<u64>,
    max_time: Option<Duration>,
}

impl Searcher {
    fn new(cfg: &ExperimentConfig) -> Self {
        Searcher {
            max_nodes: (cfg.max_nodes > 0).then_some(cfg.max_nodes),
            max_time: cfg.max_seconds.map(Duration::from_secs_f64),
        }
    }

    fn with_budget<T>(&self, f: impl FnOnce(&Budget<'_>) -> T) -> T {
        match self.max_time {
            Some(_) => {
                let clock = WallClock::start();
                f(&Budget {
                    max_nodes: self.max_nodes,
                    max_time: self.max_time,
                    clock: &clock,
                })
            }
            None => f(&Budget {
                max_nodes: self.max_nodes,
                max_time: None,
                clock: &NoClock,
            }),
        }
    }
}

struct Trial {
    index: u64,
    seed: u64,
}

fn trial(master: u64, experiment: &str, index: u64) -> Trial {
    Trial {
        index,
        seed: rng::derive_seed(master, experiment, index),
    }
}

fn graphs(d: usize, n1: usize, n2: usize, seed: u64) -> Result<(Hypergraph, Hypergraph), LabError> {
    Ok((
        Hypergraph::random_tagged(d, n1, seed, G1_STREAM)?,
        Hypergraph::random_tagged(d, n2, seed, G2_STREAM)?,
    ))
}

/// Runs `per_trial` for every trial on `jobs` workers, keeping trial order.
fn run_trials<T: Send>(
    cfg: &ExperimentConfig,
    jobs: usize,
    per_trial: impl Fn(u64) -> Result<T, LabError> + Sync + Send,
) -> Result<Vec<T>, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| config_error(format!("worker pool: {e}")))?;
    pool.install(|| (0..cfg.trials).into_par_iter().map(per_trial).collect())
}

fn decide(
    s: &Searcher,
    experiment: &str,
    t: &Trial,
    g1: &Hypergraph,
    g2: &Hypergraph,
    k: usize,
) -> Result<(TrialRecord, TimingRecord), LabError> {
    let start = Instant::now();
    let out = s.with_budget(|b| hyperlcis_core::exists_common(g1, g2, k, b))?;
    let seconds = start.elapsed().as_secs_f64();
    let (found, witness_size) = match &out.result {
        Existence::Found(w) => (Some(true), w.size),
        Existence::Absent => (Some(false), 0),
        Existence::Undecided => (None, 0),
    };
    Ok((
        TrialRecord {
            experiment: experiment.into(),
            trial: t.index,
            seed: t.seed,
            d: g1.arity(),
            n1: g1.order(),
            n2: g2.order(),
            target: Some(k),
            lcis: None,
            witness_size,
            found,
            undecided: found.is_none(),
            nodes: out.stats.nodes,
        },
        TimingRecord {
            experiment: experiment.into(),
            trial: t.index,
            n2: g2.order(),
            target: Some(k),
            seconds,
        },
    ))
}

fn prediction(cfg: &ExperimentConfig, n2: usize) -> Option<PredictionReport> {
    PredictionReport::new(
        cfg.d,
        cfg.n1 as u64,
        n2 as u64,
        cfg.epsilon,
        theory::DEFAULT_THETA,
    )
    .ok()
}

const CONCENTRATION: &str = "concentration";
const INCLUSION: &str = "inclusion-scan";
const AUDIT: &str = "audit";

const ASYMPTOTIC_NOTE: &str = "The window is an asymptotic statement; at these sizes the \
empirical distribution is reported next to it, not tested against it.";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub experiment: &'static str,
    pub note: &'static str,
    pub config: ExperimentConfig,
    pub trials: u64,
    pub decided: u64,
    pub undecided: u64,
    pub fraction_undecided: f64,
    /// LCIS size to number of decided trials.
    pub histogram: BTreeMap<usize, u64>,
    /// Most frequent size; ties go to the smaller size.
    pub mode: Option<usize>,
    pub window: Option<(i64, i64)>,
    /// Decided trials whose LCIS lies in the window, over decided trials.
    pub fraction_in_window: Option<f64>,
    pub prediction: Option<PredictionReport>,
}

pub fn run_concentration(
    cfg: &ExperimentConfig,
    jobs: usize,
) -> Result<RunOutput<ConcentrationSummary>, LabError> {
    cfg.validate()?;
    cfg.check_feasible(cfg.n1.min(cfg.n2))?;
    let s = Searcher::new(cfg);
    let rows = run_trials(cfg, jobs, |i| {
        let t = trial(cfg.seed, CONCENTRATION, i);
        let (g1, g2) = graphs(cfg.d, cfg.n1, cfg.n2, t.seed)?;
        let start = Instant::now();
        let out = s.with_budget(|b| {
            hyperlcis_core::lcis_size(&g1, &g2, LcisStrategy::BranchAndBound, b)
        })?;
        Ok((
            TrialRecord {
                experiment: CONCENTRATION.into(),
                trial: i,
                seed: t.seed,
                d: cfg.d,
                n1: cfg.n1,
                n2: cfg.n2,
                target: None,
                lcis: out.size,
                witness_size: out.witness.size,
                found: None,
                undecided: out.size.is_none(),
                nodes: out.stats.nodes,
            },
            TimingRecord {
                experiment: CONCENTRATION.into(),
                trial: i,
                n2: cfg.n2,
                target: None,
                seconds: start.elapsed().as_secs_f64(),
            },
        ))
    })?;
    let (records, timings): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let summary = summarize_concentration(cfg, &records);
    Ok(RunOutput {
        records,
        timings,
        summary,
    })
}

/// Aggregates recomputed from the records alone.
pub fn summarize_concentration(
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
) -> ConcentrationSummary {
    let mut histogram = BTreeMap::new();
    for r in records {
        if let Some(k) = r.lcis {
            *histogram.entry(k).or_insert(0u64) += 1;
        }
    }
    let decided: u64 = histogram.values().sum();
    let trials = records.len() as u64;
    let mode = histogram
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&k, _)| k);
    let prediction = prediction(cfg, cfg.n2);
    let window = prediction.as_ref().map(|p| (p.window_lo, p.window_hi));
    let fraction_in_window = window.filter(|_| decided > 0).map(|(lo, hi)| {
        let inside: u64 = histogram
            .iter()
            .filter(|(&k, _)| (lo..=hi).contains(&(k as i64)))
            .map(|(_, &c)| c)
            .sum();
        inside as f64 / decided as f64
    });
    ConcentrationSummary {
        experiment: CONCENTRATION,
        note: ASYMPTOTIC_NOTE,
        config: cfg.clone(),
        trials,
        decided,
        undecided: trials - decided,
        fraction_undecided: (trials - decided) as f64 / trials.max(1) as f64,
        histogram,
        mode,
        window,
        fraction_in_window,
        prediction,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n2: usize,
    pub embedded: u64,
    pub decided: u64,
    pub undecided: u64,
    pub frequency: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionSummary {
    pub experiment: &'static str,
    pub config: ExperimentConfig,
    pub trials: u64,
    /// Below or at this `n2` the second graph embeds w.h.p. as `n1` grows.
    pub inclusion_threshold: Option<u64>,
    pub curve: Vec<CurvePoint>,
    /// Trials where a decided embedding at some `n2` follows a decided
    /// non-embedding at a smaller `n2`.
    pub monotonicity_violations: u64,
}

/// Embeds growing prefixes of one `g2` per trial into a fixed `g1`.
///
/// Each trial samples `g2` once on `n2_max` vertices and tests its prefixes,
/// so the graph at `n2 + 1` is a completion of the graph at `n2`.
pub fn run_inclusion_scan(
    cfg: &ExperimentConfig,
    jobs: usize,
) -> Result<RunOutput<InclusionSummary>, LabError> {
    cfg.validate()?;
    let (lo, hi) = cfg.scan_range()?;
    cfg.check_feasible(hi)?;
    let s = Searcher::new(cfg);
    let rows = run_trials(cfg, jobs, |i| {
        let t = trial(cfg.seed, INCLUSION, i);
        let (g1, full) = graphs(cfg.d, cfg.n1, hi, t.seed)?;
        (lo..=hi)
            .map(|n2| decide(&s, INCLUSION, &t, &g1, &full.prefix(n2)?, n2))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let (records, timings): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    let summary = summarize_inclusion(cfg, &records);
    Ok(RunOutput {
        records,
        timings,
        summary,
    })
}

pub fn summarize_inclusion(cfg: &ExperimentConfig, records: &[TrialRecord]) -> InclusionSummary {
    let mut points: BTreeMap<usize, CurvePoint> = BTreeMap::new();
    let mut per_trial: BTreeMap<u64, Vec<(usize, bool)>> = BTreeMap::new();
    for r in records {
        let p = points.entry(r.n2).or_insert(CurvePoint {
            n2: r.n2,
            embedded: 0,
            decided: 0,
            undecided: 0,
            frequency: None,
        });
        match r.found {
            Some(f) => {
                p.decided += 1;
                p.embedded += f as u64;
                per_trial.entry(r.trial).or_default().push((r.n2, f));
            }
            None => p.undecided += 1,
        }
    }
    for p in points.values_mut() {
        p.frequency = (p.decided > 0).then(|| p.embedded as f64 / p.decided as f64);
    }
    let monotonicity_violations = per_trial
        .values_mut()
        .map(|curve| {
            curve.sort_unstable();
            let mut failed = false;
            curve.iter().any(|&(_, f)| {
                let bad = failed && f;
                failed |= !f;
                bad
            })
        })
        .filter(|&bad| bad)
        .count() as u64;
    InclusionSummary {
        experiment: INCLUSION,
        config: cfg.clone(),
        trials: cfg.trials,
        inclusion_threshold: theory::inclusion_threshold(cfg.d, cfg.n1 as u64).ok(),
        curve: points.into_values().collect(),
        monotonicity_violations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub ell: usize,
    pub expected_w: LogField,
    /// `min(1, E[W])`.
    pub markov_bound: f64,
    pub successes: u64,
    pub decided: u64,
    pub undecided: u64,
    pub frequency: Option<f64>,
    /// Binomial standard deviation of the frequency at `markov_bound`.
    pub sigma: Option<f64>,
    /// Frequency above `markov_bound + 3 sigma`.
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub experiment: &'static str,
    pub config: ExperimentConfig,
    pub trials: u64,
    pub rows: Vec<AuditRow>,
    pub violations: u64,
}

/// Compares the frequency of a common induced subgraph of size `ell` with
/// the first-moment bound `P(W > 0) <= E[W]`.
pub fn run_first_moment_audit(
    cfg: &ExperimentConfig,
    jobs: usize,
) -> Result<RunOutput<AuditSummary>, LabError> {
    cfg.validate()?;
    let (lo, hi) = cfg.ell_range()?;
    cfg.check_feasible(hi)?;
    let s = Searcher::new(cfg);
    let rows = run_trials(cfg, jobs, |i| {
        let t = trial(cfg.seed, AUDIT, i);
        let (g1, g2) = graphs(cfg.d, cfg.n1, cfg.n2, t.seed)?;
        (lo..=hi)
            .map(|ell| decide(&s, AUDIT, &t, &g1, &g2, ell))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let (records, timings): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    let summary = summarize_audit(cfg, &records)?;
    Ok(RunOutput {
        records,
        timings,
        summary,
    })
}

pub fn summarize_audit(
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
) -> Result<AuditSummary, LabError> {
    let mut by_ell: BTreeMap<usize, (u64, u64, u64)> = BTreeMap::new();
    for r in records {
        let e = by_ell.entry(r.target.unwrap_or(0)).or_default();
        match r.found {
            Some(f) => {
                e.0 += f as u64;
                e.1 += 1;
            }
            None => e.2 += 1,
        }
    }
    let mut rows = Vec::new();
    for (ell, (successes, decided, undecided)) in by_ell {
        let ew = expected_w(cfg.d, cfg.n1 as u64, cfg.n2 as u64, ell as u64)?;
        let p = markov_tail(&ew);
        let frequency = (decided > 0).then(|| successes as f64 / decided as f64);
        let sigma = (decided > 0).then(|| (p * (1.0 - p) / decided as f64).sqrt());
        let violation = match (frequency, sigma) {
            (Some(f), Some(s)) => f > p + 3.0 * s,
            _ => false,
        };
        rows.push(AuditRow {
            ell,
            expected_w: LogField::from(&ew),
            markov_bound: p,
            successes,
            decided,
            undecided,
            frequency,
            sigma,
            violation,
        });
    }
    Ok(AuditSummary {
        experiment: AUDIT,
        config: cfg.clone(),
        trials: cfg.trials,
        violations: rows.iter().filter(|r| r.violation).count() as u64,
        rows,
    })
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, LabError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| config_error(format!("csv buffer: {e}")))
}

/// `trials.csv` exactly as written to disk.
pub fn trials_csv(records: &[TrialRecord]) -> Result<Vec<u8>, LabError> {
    csv_bytes(records)
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<(), LabError> {
    std::fs::write(&path, bytes).map_err(|source| LabError::Io { path, source })
}

/// Writes `trials.csv`, `timings.csv` and `summary.json` into `dir`.
pub fn write_outputs<S: Serialize>(dir: &Path, run: &RunOutput<S>) -> Result<(), LabError> {
    std::fs::create_dir_all(dir).map_err(|source| LabError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write(dir.join("trials.csv"), &trials_csv(&run.records)?)?;
    write(dir.join("timings.csv"), &csv_bytes(&run.timings)?)?;
    let mut json = serde_json::to_vec_pretty(&run.summary)?;
    json.push(b'\n');
    write(dir.join("summary.json"), &json)
}
