//! The comparison experiment: every algorithm trained from a number of
//! seeded initialisations, each run scored by its match percentage, and the
//! resulting matrix pushed through ANOVA, Duncan and t-test stages to pick
//! the most appropriate algorithm.

mod cascade;
mod report;
mod results;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

pub use cascade::{selection_cascade, SelectionReport, Stage, Winner};
pub use report::{render_report, verdict_line, ReportFormat};
pub use results::{parse_results_csv, results_csv};

use crate::dataset::{fit_normalizer, train_test_view, Dataset, DatasetError, NormalizationParams};
use crate::network::{init_weights, predict, InitScheme, NetworkError, Topology, Weights};
use crate::optimizers::{train_run, AlgorithmId, ConfigError, HyperParams, StopReason, TrainConfig};
use crate::stats::{GroupSummary, StatsError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("results file: {0}")]
    Results(String),
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

/// Everything that determines an experiment's outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `None` selects the bundled sample.
    pub dataset: Option<PathBuf>,
    pub topology: Topology,
    pub train: TrainConfig,
    pub hyper: HyperParams,
    pub algorithms: Vec<AlgorithmId>,
    pub replicates: usize,
    /// Absolute tolerance on the output scale for a prediction to count as a match.
    pub match_tolerance: f64,
    pub alpha: f64,
    pub master_seed: u64,
    pub init_scheme: InitScheme,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            topology: Topology::default_experiment(),
            train: TrainConfig::default(),
            hyper: HyperParams::default(),
            algorithms: AlgorithmId::ALL.to_vec(),
            replicates: 20,
            match_tolerance: 0.05,
            alpha: 0.05,
            master_seed: 1,
            init_scheme: InitScheme::NguyenWidrow,
        }
    }
}

fn require(ok: bool, field: &'static str, constraint: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid { field, constraint })
    }
}

impl ExperimentConfig {
    /// Checks every invariant; returns warnings for legal but ineffective settings.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        require(self.replicates >= 2, "replicates", "replicates ≥ 2")?;
        require(self.alpha > 0.0 && self.alpha <= 0.5, "alpha", "0 < alpha ≤ 0.5")?;
        require(self.match_tolerance > 0.0 && self.match_tolerance.is_finite(), "match_tolerance", "match_tolerance > 0")?;
        require(!self.algorithms.is_empty(), "algorithms", "at least one algorithm")?;
        let mut sorted = self.algorithms.clone();
        sorted.sort();
        sorted.dedup();
        require(sorted.len() == self.algorithms.len(), "algorithms", "no repeated algorithm")?;
        require(self.topology.depth() >= 2, "topology", "at least one hidden layer")?;
        require(
            self.topology.inputs() == crate::dataset::FEATURE_COUNT,
            "topology",
            "input layer must have 6 neurons",
        )?;
        self.hyper.validate()?;
        self.train.validate(&self.algorithms)
    }
}

/// Percentage of items whose prediction is within `tolerance` of the target.
pub fn match_percentage(
    weights: &Weights,
    topology: &Topology,
    data: &Dataset,
    normalizer: &NormalizationParams,
    tolerance: f64,
) -> Result<f64, HarnessError> {
    if data.is_empty() {
        return Err(DatasetError::Empty.into());
    }
    let (samples, _) = normalizer.samples(data);
    let predictions = predict(weights, topology, &samples)?;
    let hits = predictions.iter().zip(&samples).filter(|(p, s)| (*p - s.target).abs() <= tolerance).count();
    Ok(100.0 * hits as f64 / samples.len() as f64)
}

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed of one run. Each index is folded in through its own splitmix64
/// finalisation, so neighbouring and transposed index pairs are unrelated.
pub fn derive_run_seed(master_seed: u64, algorithm: usize, replicate: usize) -> u64 {
    let h = splitmix(master_seed.wrapping_add(GOLDEN_GAMMA));
    let h = splitmix(h ^ (algorithm as u64 + 1).wrapping_mul(GOLDEN_GAMMA));
    splitmix(h.wrapping_add((replicate as u64 + 1).wrapping_mul(0xd1b5_4a32_d192_ed03)))
}

/// Outcome of one training run apart from its match percentage.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub final_mse: f64,
    pub epochs: usize,
    pub stop_reason: StopReason,
}

/// Match percentages indexed `[algorithm][replicate]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchMatrix {
    pub labels: Vec<String>,
    pub percentages: Vec<Vec<f64>>,
    /// Present when the matrix came from training runs or a results file.
    pub runs: Option<Vec<Vec<RunOutcome>>>,
}

impl MatchMatrix {
    pub fn new(labels: Vec<String>, percentages: Vec<Vec<f64>>) -> Result<Self, HarnessError> {
        if labels.len() != percentages.len() {
            return Err(HarnessError::Results(format!(
                "{} labels for {} rows",
                labels.len(),
                percentages.len()
            )));
        }
        let width = percentages.first().map_or(0, Vec::len);
        for (label, row) in labels.iter().zip(&percentages) {
            if row.len() != width {
                return Err(HarnessError::Results(format!(
                    "`{label}` has {} replicates, expected {width}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=100.0).contains(*v)) {
                return Err(HarnessError::Results(format!("`{label}` has match percentage {v} outside [0, 100]")));
            }
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(HarnessError::Results("repeated algorithm label".into()));
        }
        Ok(Self { labels, percentages, runs: None })
    }

    pub fn replicates(&self) -> usize {
        self.percentages.first().map_or(0, Vec::len)
    }

    pub fn summary(&self, index: usize) -> GroupSummary {
        GroupSummary::from_values(self.labels[index].clone(), &self.percentages[index]).expect("rows are non-empty")
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Trains every (algorithm, replicate) pair and scores it. `workers = 0`
/// uses one worker per core. Output does not depend on `workers`; `progress`
/// is called with (finished, total) as runs complete.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    workers: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<MatchMatrix, HarnessError> {
    cfg.validate()?;
    let dataset = match &cfg.dataset {
        Some(path) => Dataset::load(path)?,
        None => Dataset::sample(),
    };
    let (train_set, test_set) = train_test_view(&dataset)?;
    let normalizer = fit_normalizer(&train_set)?;
    let (train_samples, _) = normalizer.samples(&train_set);

    let tasks: Vec<(usize, AlgorithmId, usize)> = cfg
        .algorithms
        .iter()
        .enumerate()
        .flat_map(|(row, &a)| (0..cfg.replicates).map(move |r| (row, a, r)))
        .collect();
    let total = tasks.len();
    let done = AtomicUsize::new(0);

    let run_one = |&(_, algorithm, replicate): &(usize, AlgorithmId, usize)| -> Result<(f64, RunOutcome), HarnessError> {
        // canonical index, so reordering the algorithm list keeps each run's seed
        let canonical = AlgorithmId::ALL.iter().position(|&a| a == algorithm).unwrap();
        let seed = derive_run_seed(cfg.master_seed, canonical, replicate);
        let w0 = init_weights(&cfg.topology, seed, cfg.init_scheme);
        let record = train_run(&w0, &cfg.topology, &train_samples, algorithm, &cfg.train, &cfg.hyper)?;
        let final_mse = record.final_mse();
        let weights = Weights::from_vec(&cfg.topology, record.final_weights)?;
        let pct = match_percentage(&weights, &cfg.topology, &test_set, &normalizer, cfg.match_tolerance)?;
        progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
        Ok((pct, RunOutcome { seed, final_mse, epochs: record.epochs_used, stop_reason: record.stop_reason }))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Workers(e.to_string()))?;
    // indexed collect: results come back in task order whatever the scheduling
    let outcomes: Vec<(f64, RunOutcome)> =
        pool.install(|| tasks.par_iter().map(run_one).collect::<Result<Vec<_>, _>>())?;

    let mut percentages = vec![Vec::with_capacity(cfg.replicates); cfg.algorithms.len()];
    let mut runs = vec![Vec::with_capacity(cfg.replicates); cfg.algorithms.len()];
    for ((row, _, _), (pct, outcome)) in tasks.iter().zip(outcomes) {
        percentages[*row].push(pct);
        runs[*row].push(outcome);
    }
    let labels = cfg.algorithms.iter().map(|a| a.name().to_string()).collect();
    let mut m = MatchMatrix::new(labels, percentages)?;
    m.runs = Some(runs);
    Ok(m)
}
