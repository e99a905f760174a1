//! Monte Carlo study of frontier estimators on Leontief fixed-proportion data.
//!
//! Data-generating process for one replication: inputs `x_mn ~ U[0, 100]`,
//! output `y_n = min_m(x_mn) * exp(-μ_n)` with half-normal inefficiency
//! `μ_n = |z|`, `z ~ Normal(0, σ²)`. The true radial efficiency is `exp(-μ_n)`.
//!
//! Each replication draws from its own ChaCha stream keyed by the scenario and
//! the replication index, so results do not depend on scheduling or thread
//! count.

use std::fmt::{self, Write as _};
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dea_models::{score_barnum, score_ccr_multiplier, DmuPanel};
use crate::error::DeaError;
use crate::fp_dea::{score_fp, FpStructure};

pub const INPUT_DIMENSIONS: [usize; 2] = [2, 3];
pub const SAMPLE_SIZES: [usize; 6] = [30, 50, 100, 300, 500, 1000];
/// `0.0` is the no-inefficiency column.
pub const INEFFICIENCY_SIGMAS: [f64; 4] = [1.0, 2.0, 3.0, 0.0];
pub const DEFAULT_REPLICATIONS: usize = 1000;

const INPUT_UPPER: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{scenario}, replication {replication}: {source}")]
    Estimator {
        scenario: String,
        replication: usize,
        #[source]
        source: DeaError,
    },
}

/// One cell of the Monte Carlo grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_inputs: usize,
    pub sample_size: usize,
    /// `0.0` means no inefficiency.
    pub inefficiency_sigma: f64,
    pub n_replications: usize,
    pub rng_seed: u64,
}

impl ScenarioConfig {
    pub fn new(n_inputs: usize, sample_size: usize, inefficiency_sigma: f64) -> Self {
        Self {
            n_inputs,
            sample_size,
            inefficiency_sigma,
            n_replications: DEFAULT_REPLICATIONS,
            rng_seed: 0,
        }
    }

    pub fn with_replications(mut self, n_replications: usize) -> Self {
        self.n_replications = n_replications;
        self
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |msg: &str| Err(SimulationError::InvalidScenario(format!("{self}: {msg}")));
        if self.n_inputs == 0 {
            return bad("at least one input is required");
        }
        if self.sample_size == 0 {
            return bad("sample size must be positive");
        }
        if !self.inefficiency_sigma.is_finite() || self.inefficiency_sigma < 0.0 {
            return bad("inefficiency sigma must be finite and >= 0");
        }
        if self.n_replications == 0 {
            return bad("at least one replication is required");
        }
        Ok(())
    }

    /// The 48-cell grid: `M` x `N` x `σ`, in table order.
    pub fn full_grid(n_replications: usize, rng_seed: u64) -> Vec<Self> {
        let mut grid = Vec::with_capacity(48);
        for &m in &INPUT_DIMENSIONS {
            for &n in &SAMPLE_SIZES {
                for &sigma in &INEFFICIENCY_SIGMAS {
                    grid.push(
                        Self::new(m, n, sigma)
                            .with_replications(n_replications)
                            .with_seed(rng_seed),
                    );
                }
            }
        }
        grid
    }

    fn stream_key(&self) -> u64 {
        let mut h = splitmix64(self.rng_seed);
        for word in [
            self.n_inputs as u64,
            self.sample_size as u64,
            self.inefficiency_sigma.to_bits(),
        ] {
            h = splitmix64(h ^ word);
        }
        h
    }

    fn rng(&self, replication: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.stream_key());
        rng.set_stream(replication as u64);
        rng
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={},N={},sigma={},reps={},seed={}",
            self.n_inputs,
            self.sample_size,
            self.inefficiency_sigma,
            self.n_replications,
            self.rng_seed
        )
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSample {
    /// `S = 1`.
    pub panel: DmuPanel,
    /// `exp(-μ_n)`
    pub true_theta: Vec<f64>,
}

/// Draws replication `replication_index` of `cfg`. Deterministic in
/// `(cfg, replication_index)`; the replication count in `cfg` is ignored.
pub fn generate_sample(cfg: &ScenarioConfig, replication_index: usize) -> GeneratedSample {
    let mut rng = cfg.rng(replication_index);
    let inefficiency = (cfg.inefficiency_sigma > 0.0)
        .then(|| Normal::new(0.0, cfg.inefficiency_sigma).expect("sigma validated finite and > 0"));

    let mut inputs = Vec::with_capacity(cfg.sample_size);
    let mut outputs = Vec::with_capacity(cfg.sample_size);
    let mut true_theta = Vec::with_capacity(cfg.sample_size);
    for _ in 0..cfg.sample_size {
        let x: Vec<f64> = (0..cfg.n_inputs)
            .map(|_| rng.random_range(0.0..=INPUT_UPPER))
            .collect();
        let mu = inefficiency.map_or(0.0, |d| d.sample(&mut rng).abs());
        let efficiency = (-mu).exp();
        let frontier = x.iter().copied().fold(f64::INFINITY, f64::min);
        outputs.push(vec![frontier * efficiency]);
        inputs.push(x);
        true_theta.push(efficiency);
    }
    let panel = DmuPanel::from_rows(inputs, outputs).expect("generated data is finite and >= 0");
    GeneratedSample { panel, true_theta }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Estimator {
    /// CCR multiplier model
    #[serde(rename = "CCR")]
    Ccr,
    /// CCR with all input pairs non-substitutable
    #[serde(rename = "FP")]
    Fp,
    /// CCR with all input weights tied
    #[serde(rename = "BG")]
    Bg,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Ccr, Estimator::Fp, Estimator::Bg];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Ccr => "CCR",
            Estimator::Fp => "FP",
            Estimator::Bg => "BG",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-DMU estimates of one replication, in the order of the requested
/// estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationScores {
    pub estimates: Vec<(Estimator, Vec<f64>)>,
}

impl ReplicationScores {
    pub fn get(&self, estimator: Estimator) -> Option<&[f64]> {
        self.estimates
            .iter()
            .find(|(e, _)| *e == estimator)
            .map(|(_, v)| v.as_slice())
    }
}

/// Scores every DMU of `sample` with each estimator. FP declares every input
/// pair non-substitutable; BG ties every input pair.
pub fn score_sample(
    sample: &GeneratedSample,
    estimators: &[Estimator],
) -> Result<ReplicationScores, DeaError> {
    let panel = &sample.panel;
    let all_pairs = FpStructure::all_input_pairs(panel.n_inputs());
    let estimates = estimators
        .iter()
        .map(|&est| {
            let thetas = (0..panel.n_dmus())
                .map(|i| {
                    let r = match est {
                        Estimator::Ccr => score_ccr_multiplier(panel, i),
                        Estimator::Fp => score_fp(panel, i, &all_pairs),
                        Estimator::Bg => score_barnum(panel, i, &all_pairs),
                    }?;
                    Ok(r.theta)
                })
                .collect::<Result<Vec<_>, DeaError>>()?;
            Ok((est, thetas))
        })
        .collect::<Result<_, DeaError>>()?;
    Ok(ReplicationScores { estimates })
}

pub fn mean_squared_error(estimated: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(estimated.len(), truth.len());
    let sum: f64 = estimated
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t) * (e - t))
        .sum();
    sum / estimated.len() as f64
}

/// Pearson correlation; `None` when either series is constant.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if a.len() < 2 {
        return None;
    }
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    /// Mean over replications of the per-replication MSE.
    pub mse: f64,
    /// Mean over replications of the per-replication correlation with the
    /// true efficiencies; `None` when the true efficiencies are constant.
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub scenario: ScenarioConfig,
    pub replications: usize,
    pub estimators: Vec<EstimatorSummary>,
}

impl SimulationSummary {
    pub fn get(&self, estimator: Estimator) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|s| s.estimator == estimator)
    }
}

struct ReplicationStats {
    mse: Vec<f64>,
    correlation: Vec<Option<f64>>,
}

fn replication_stats(
    cfg: &ScenarioConfig,
    replication: usize,
    estimators: &[Estimator],
) -> Result<ReplicationStats, SimulationError> {
    let sample = generate_sample(cfg, replication);
    let scores =
        score_sample(&sample, estimators).map_err(|source| SimulationError::Estimator {
            scenario: cfg.to_string(),
            replication,
            source,
        })?;
    let truth = &sample.true_theta;
    Ok(ReplicationStats {
        mse: scores
            .estimates
            .iter()
            .map(|(_, e)| mean_squared_error(e, truth))
            .collect(),
        correlation: scores
            .estimates
            .iter()
            .map(|(_, e)| pearson_correlation(truth, e))
            .collect(),
    })
}

/// Runs every replication of `cfg` with CCR, FP and BG.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimulationSummary, SimulationError> {
    run_scenario_with(cfg, &Estimator::ALL)
}

/// Runs every replication of `cfg` with the given estimators. Replications
/// run on the current rayon pool and are reduced in index order.
pub fn run_scenario_with(
    cfg: &ScenarioConfig,
    estimators: &[Estimator],
) -> Result<SimulationSummary, SimulationError> {
    cfg.validate()?;
    let per_replication: Vec<_> = (0..cfg.n_replications)
        .into_par_iter()
        .map(|r| replication_stats(cfg, r, estimators))
        .collect();

    let mut mse_sum = vec![0.0; estimators.len()];
    let mut corr_sum = vec![0.0; estimators.len()];
    let mut corr_count = vec![0usize; estimators.len()];
    for stats in per_replication {
        let stats = stats?;
        for k in 0..estimators.len() {
            mse_sum[k] += stats.mse[k];
            if let Some(c) = stats.correlation[k] {
                corr_sum[k] += c;
                corr_count[k] += 1;
            }
        }
    }
    let reps = cfg.n_replications as f64;
    let constant_truth = cfg.inefficiency_sigma == 0.0;
    let summaries = estimators
        .iter()
        .enumerate()
        .map(|(k, &estimator)| EstimatorSummary {
            estimator,
            mse: mse_sum[k] / reps,
            correlation: (!constant_truth && corr_count[k] > 0)
                .then(|| corr_sum[k] / corr_count[k] as f64),
        })
        .collect();
    Ok(SimulationSummary {
        scenario: *cfg,
        replications: cfg.n_replications,
        estimators: summaries,
    })
}

/// A grid run stopped at `failed_index`; `completed` holds the scenarios that
/// finished before it.
#[derive(Debug, Error)]
#[error("scenario {failed_index} failed: {source}")]
pub struct GridError {
    pub completed: Vec<SimulationSummary>,
    pub failed_index: usize,
    #[source]
    pub source: SimulationError,
}

/// Runs each scenario in order.
pub fn run_grid(scenarios: &[ScenarioConfig]) -> Result<Vec<SimulationSummary>, GridError> {
    let mut completed = Vec::with_capacity(scenarios.len());
    for (failed_index, cfg) in scenarios.iter().enumerate() {
        match run_scenario(cfg) {
            Ok(summary) => completed.push(summary),
            Err(source) => {
                return Err(GridError {
                    completed,
                    failed_index,
                    source,
                })
            }
        }
    }
    Ok(completed)
}

pub const CSV_HEADER: [&str; 8] = [
    "M",
    "N",
    "sigma",
    "estimator",
    "mse",
    "correlation",
    "reps",
    "seed",
];

/// One row per (scenario, estimator). Undefined correlations are written as
/// `NA`.
pub fn write_summary_csv<W: io::Write>(
    summaries: &[SimulationSummary],
    writer: W,
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(CSV_HEADER)?;
    for summary in summaries {
        let sc = &summary.scenario;
        for est in &summary.estimators {
            out.write_record([
                sc.n_inputs.to_string(),
                sc.sample_size.to_string(),
                sc.inefficiency_sigma.to_string(),
                est.estimator.to_string(),
                format!("{:?}", est.mse),
                est.correlation
                    .map_or_else(|| "NA".to_string(), |c| format!("{c:?}")),
                summary.replications.to_string(),
                sc.rng_seed.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Values of the three estimators in one table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub sigma: f64,
    pub label: String,
    #[serde(rename = "CCR")]
    pub ccr: Option<f64>,
    #[serde(rename = "FP")]
    pub fp: Option<f64>,
    #[serde(rename = "BG")]
    pub bg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "M")]
    pub n_inputs: usize,
    #[serde(rename = "N")]
    pub sample_size: usize,
    pub cells: Vec<ReportCell>,
}

/// MSE and correlation tables: one row per `(M, N)` in first-seen order, one
/// cell per inefficiency level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub mse: Vec<ReportRow>,
    pub correlation: Vec<ReportRow>,
    pub scenarios: Vec<SimulationSummary>,
}

fn sigma_label(sigma: f64) -> String {
    if sigma == 0.0 {
        "no inefficiency".to_string()
    } else {
        format!("sigma={sigma}")
    }
}

pub fn build_report(summaries: &[SimulationSummary]) -> SimulationReport {
    let table = |pick: &dyn Fn(&EstimatorSummary) -> Option<f64>| {
        let mut rows: Vec<ReportRow> = Vec::new();
        for s in summaries {
            let sc = &s.scenario;
            let cell = ReportCell {
                sigma: sc.inefficiency_sigma,
                label: sigma_label(sc.inefficiency_sigma),
                ccr: s.get(Estimator::Ccr).and_then(pick),
                fp: s.get(Estimator::Fp).and_then(pick),
                bg: s.get(Estimator::Bg).and_then(pick),
            };
            match rows
                .iter_mut()
                .find(|r| r.n_inputs == sc.n_inputs && r.sample_size == sc.sample_size)
            {
                Some(row) => row.cells.push(cell),
                None => rows.push(ReportRow {
                    n_inputs: sc.n_inputs,
                    sample_size: sc.sample_size,
                    cells: vec![cell],
                }),
            }
        }
        rows
    };
    SimulationReport {
        mse: table(&|e| Some(e.mse)),
        correlation: table(&|e| e.correlation),
        scenarios: summaries.to_vec(),
    }
}

pub fn write_report_json<W: io::Write>(
    summaries: &[SimulationSummary],
    writer: W,
) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(writer, &build_report(summaries))
}

/// Plain-text MSE and correlation tables.
pub fn format_tables(summaries: &[SimulationSummary]) -> String {
    let report = build_report(summaries);
    let fmt_value = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
    let mut out = String::new();
    for (title, rows) in [("MSE", &report.mse), ("Correlation", &report.correlation)] {
        let _ = writeln!(out, "{title}");
        for row in rows {
            let _ = write!(out, "M={} N={:<5}", row.n_inputs, row.sample_size);
            for cell in &row.cells {
                let _ = write!(
                    out,
                    " | {}: CCR {} FP {} BG {}",
                    cell.label,
                    fmt_value(cell.ccr),
                    fmt_value(cell.fp),
                    fmt_value(cell.bg)
                );
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
