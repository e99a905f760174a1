//! The `fpdea` command line: scoring CSV panels, running the Monte Carlo
//! grid, and drawing 2-input isoquants.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpdea::isoquant::{build_all, render_svg, write_vertices_csv, IsoquantError};
use fpdea::simulation::{
    format_tables, generate_sample, run_grid, write_report_json, write_summary_csv, GridError,
    ScenarioConfig, DEFAULT_REPLICATIONS,
};
use fpdea::{
    score_barnum, score_ccr_multiplier, score_envelopment, score_fp, DeaError, DmuPanel,
    FpStructure, SupportBranch, Technology,
};
use thiserror::Error;

pub const SUMMARY_CSV: &str = "simulation_summary.csv";
pub const REPORT_JSON: &str = "simulation_report.json";
pub const DEFAULT_SEED: u64 = 0;
pub const THREADS_ENV: &str = "FPDEA_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fpdea",
    version,
    about = "Frontier estimation for fixed-proportion technologies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every DMU of a CSV panel.
    Score(ScoreArgs),
    /// Run Monte Carlo scenarios and write summary tables.
    Simulate(SimulateArgs),
    /// Draw the unit-output isoquants of a 2-input panel.
    Isoquant(IsoquantArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorChoice {
    Ccr,
    Bcc,
    Fdh,
    Fp,
    Bg,
    All,
}

impl EstimatorChoice {
    const SINGLE: [EstimatorChoice; 5] = [Self::Ccr, Self::Bcc, Self::Fdh, Self::Fp, Self::Bg];

    fn expand(self) -> Vec<EstimatorChoice> {
        match self {
            Self::All => Self::SINGLE.to_vec(),
            one => vec![one],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ccr => "CCR",
            Self::Bcc => "BCC",
            Self::Fdh => "FDH",
            Self::Fp => "FP",
            Self::Bg => "BG",
            Self::All => "ALL",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct FpArgs {
    /// Non-substitutable input pair, e.g. `x1,x2`, or `all` for every pair.
    /// Repeatable.
    #[arg(long = "fp-inputs", alias = "fp", value_name = "PAIR")]
    pub fp_inputs: Vec<String>,
    /// Non-transformable output pair, e.g. `y1,y2`, or `all`. Repeatable.
    #[arg(long = "fp-outputs", value_name = "PAIR")]
    pub fp_outputs: Vec<String>,
}

impl FpArgs {
    fn is_empty(&self) -> bool {
        self.fp_inputs.is_empty() && self.fp_outputs.is_empty()
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Panel CSV with header `dmu,x1..xM,y1..yS`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, short, value_enum, default_value = "ccr")]
    pub estimator: EstimatorChoice,
    #[command(flatten)]
    pub fp: FpArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Replications per scenario.
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
    pub reps: usize,
    /// Scenario such as `M=2,N=30,sigma=0`. Repeatable; the full 48-cell
    /// grid runs when omitted.
    #[arg(long = "cells", value_name = "CELL")]
    pub cells: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Directory receiving the summary CSV and JSON report.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct IsoquantArgs {
    /// 2-input, 1-output panel CSV.
    #[arg(
        long,
        short,
        conflicts_with = "scenario",
        required_unless_present = "scenario"
    )]
    pub input: Option<PathBuf>,
    /// Generate the panel instead, e.g. `M=2,N=30,sigma=0,seed=7`.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, default_value = "isoquant.svg")]
    pub svg: PathBuf,
    #[arg(long, default_value = "isoquant_vertices.csv")]
    pub csv: PathBuf,
    #[command(flatten)]
    pub fp: FpArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{estimator} failed for DMU '{dmu}': {source}")]
    Estimator {
        estimator: &'static str,
        dmu: String,
        #[source]
        source: DeaError,
    },
    #[error("simulation failed at {scenario}: {source}")]
    Simulation { scenario: String, source: GridError },
    #[error("isoquant: {0}")]
    Isoquant(#[from] IsoquantError),
    #[error("{path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Isoquant(
                IsoquantError::WrongDimensions { .. } | IsoquantError::NoProducingDmu,
            ) => 2,
            _ => 3,
        }
    }
}

fn output_error(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.display().to_string(),
        source,
    }
}

/// Number of worker threads from `FPDEA_THREADS`; `None` means automatic.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{raw}'"
            ))),
        },
    }
}

/// Runs a parsed command inside a pool sized by `FPDEA_THREADS`.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Score(args) => cmd_score(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Isoquant(args) => cmd_isoquant(&args),
    })
}

/// A panel read from CSV, with the column names needed to resolve `--fp-*`.
#[derive(Debug)]
pub struct LoadedPanel {
    pub panel: DmuPanel,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
}

pub fn read_panel(path: &Path) -> Result<LoadedPanel, CliError> {
    let bad = |message: String| CliError::Input {
        path: path.display().to_string(),
        message,
    };
    let file = File::open(path).map_err(|e| bad(e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| bad(format!("line 1: {e}")))?
        .clone();

    if header.get(0) != Some("dmu") {
        return Err(bad("line 1: first column must be 'dmu'".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n_inputs = names.iter().take_while(|c| c.starts_with('x')).count();
    let n_outputs = names.len() - n_inputs;
    for (k, name) in names.iter().enumerate() {
        let expected = if k < n_inputs {
            format!("x{}", k + 1)
        } else {
            format!("y{}", k - n_inputs + 1)
        };
        if *name != expected {
            return Err(bad(format!(
                "line 1: expected column '{expected}', found '{name}'"
            )));
        }
    }
    if n_inputs == 0 || n_outputs == 0 {
        return Err(bad("line 1: need at least one x and one y column".into()));
    }

    let (mut labels, mut inputs, mut outputs) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = Vec::with_capacity(names.len());
        for (name, field) in names.iter().zip(record.iter().skip(1)) {
            let v: f64 = field.parse().map_err(|_| {
                bad(format!(
                    "line {line}: column '{name}': '{field}' is not a number"
                ))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(format!(
                    "line {line}: column '{name}': {v} must be finite and non-negative"
                )));
            }
            values.push(v);
        }
        labels.push(record[0].to_string());
        outputs.push(values.split_off(n_inputs));
        inputs.push(values);
    }
    if labels.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let panel = DmuPanel::new(labels, inputs, outputs).map_err(|e| bad(e.to_string()))?;
    let input_names = names[..n_inputs].to_vec();
    let output_names = names[n_inputs..].to_vec();
    Ok(LoadedPanel {
        panel,
        input_names,
        output_names,
    })
}

fn parse_pairs(specs: &[String], columns: &[String]) -> Result<Vec<(usize, usize)>, CliError> {
    let mut pairs = Vec::new();
    for spec in specs {
        if spec.trim() == "all" {
            let n = columns.len();
            pairs.extend((0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))));
            continue;
        }
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let [a, b] = parts[..] else {
            return Err(CliError::Usage(format!(
                "'{spec}': expected two comma-separated columns"
            )));
        };
        let find = |name: &str| {
            columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| CliError::Usage(format!("'{spec}': unknown column '{name}'")))
        };
        let (ia, ib) = (find(a)?, find(b)?);
        if ia == ib {
            return Err(CliError::Usage(format!(
                "'{spec}': a column cannot be paired with itself"
            )));
        }
        pairs.push((ia, ib));
    }
    Ok(pairs)
}

pub fn parse_fp(args: &FpArgs, loaded: &LoadedPanel) -> Result<FpStructure, CliError> {
    let inputs = parse_pairs(&args.fp_inputs, &loaded.input_names)?;
    let outputs = parse_pairs(&args.fp_outputs, &loaded.output_names)?;
    FpStructure::new(inputs, outputs).map_err(|e| CliError::Usage(e.to_string()))
}

/// Zeroed columns of a branch joined by `;`, e.g. `x2;y1`.
pub fn format_branch(branch: &SupportBranch, loaded: &LoadedPanel) -> String {
    let inputs = branch
        .zeroed_inputs
        .iter()
        .map(|&i| loaded.input_names[i].as_str());
    let outputs = branch
        .zeroed_outputs
        .iter()
        .map(|&s| loaded.output_names[s].as_str());
    inputs.chain(outputs).collect::<Vec<_>>().join(";")
}

pub fn cmd_score(args: &ScoreArgs) -> Result<(), CliError> {
    let loaded = read_panel(&args.input)?;
    let fp = parse_fp(&args.fp, &loaded)?;
    let panel = &loaded.panel;

    let mut rows = Vec::new();
    for estimator in args.estimator.expand() {
        for dmu in 0..panel.n_dmus() {
            let result = match estimator {
                EstimatorChoice::Ccr => score_ccr_multiplier(panel, dmu),
                EstimatorChoice::Bcc => score_envelopment(panel, dmu, Technology::VRS),
                EstimatorChoice::Fdh => score_envelopment(panel, dmu, Technology::FDH),
                EstimatorChoice::Fp => score_fp(panel, dmu, &fp),
                EstimatorChoice::Bg => score_barnum(panel, dmu, &fp),
                EstimatorChoice::All => unreachable!("expanded above"),
            }
            .map_err(|source| CliError::Estimator {
                estimator: estimator.name(),
                dmu: panel.label(dmu).to_string(),
                source,
            })?;
            let branch = result
                .support_branch
                .as_ref()
                .map(|b| format_branch(b, &loaded))
                .unwrap_or_default();
            rows.push([
                panel.label(dmu).to_string(),
                result.theta.to_string(),
                estimator.name().into(),
                branch,
            ]);
        }
    }

    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(output_error(path))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let to_io = |e: csv::Error| output_error(&path)(e.into());
    let mut out = csv::Writer::from_writer(sink);
    out.write_record(["dmu", "theta", "estimator", "support_branch"])
        .map_err(to_io)?;
    for row in rows {
        out.write_record(row).map_err(to_io)?;
    }
    out.flush().map_err(output_error(&path))
}

/// Parses `M=2,N=30,sigma=0[,seed=7][,reps=10]` on top of `base`.
pub fn parse_cell(spec: &str, base: ScenarioConfig) -> Result<ScenarioConfig, CliError> {
    let bad = |why: String| CliError::Usage(format!("scenario '{spec}': {why}"));
    let (mut m, mut n, mut sigma) = (None, None, None);
    let mut cfg = base;
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("'{part}' is not key=value")))?;
        let value = value.trim();
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| bad(format!("{key}: '{v}' is not an integer")))
        };
        match key.trim() {
            "M" => m = Some(int(value)?),
            "N" => n = Some(int(value)?),
            "sigma" => {
                sigma = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| bad(format!("sigma: '{value}' is not a number")))?,
                )
            }
            "seed" => {
                cfg.rng_seed = value
                    .parse()
                    .map_err(|_| bad(format!("seed: '{value}' is not an integer")))?
            }
            "reps" => cfg.n_replications = int(value)?,
            other => return Err(bad(format!("unknown key '{other}'"))),
        }
    }
    let (Some(m), Some(n), Some(sigma)) = (m, n, sigma) else {
        return Err(bad("M, N and sigma are required".into()));
    };
    cfg.n_inputs = m;
    cfg.sample_size = n;
    cfg.inefficiency_sigma = sigma;
    cfg.validate().map_err(|e| bad(e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("reps must be ≥ 1".into()));
    }
    let base = ScenarioConfig::new(2, 30, 0.0)
        .with_replications(args.reps)
        .with_seed(args.seed);
    let scenarios = if args.cells.is_empty() {
        ScenarioConfig::full_grid(args.reps, args.seed)
    } else {
        args.cells
            .iter()
            .map(|c| parse_cell(c, base))
            .collect::<Result<Vec<_>, _>>()?
    };

    let summaries = run_grid(&scenarios).map_err(|source| CliError::Simulation {
        scenario: scenarios[source.failed_index].to_string(),
        source,
    })?;

    fs::create_dir_all(&args.out_dir).map_err(output_error(&args.out_dir))?;
    let csv_path = args.out_dir.join(SUMMARY_CSV);
    let file = File::create(&csv_path).map_err(output_error(&csv_path))?;
    write_summary_csv(&summaries, BufWriter::new(file))
        .map_err(|e| output_error(&csv_path)(e.into()))?;

    let json_path = args.out_dir.join(REPORT_JSON);
    let mut file = BufWriter::new(File::create(&json_path).map_err(output_error(&json_path))?);
    write_report_json(&summaries, &mut file).map_err(|e| output_error(&json_path)(e.into()))?;
    writeln!(file)
        .and_then(|_| file.flush())
        .map_err(output_error(&json_path))?;

    print!("{}", format_tables(&summaries));
    Ok(())
}

pub fn cmd_isoquant(args: &IsoquantArgs) -> Result<(), CliError> {
    let (panel, fp) = match (&args.input, &args.scenario) {
        (Some(path), _) => {
            let loaded = read_panel(path)?;
            let fp = if args.fp.is_empty() {
                None
            } else {
                Some(parse_fp(&args.fp, &loaded)?)
            };
            (loaded.panel, fp)
        }
        (None, Some(spec)) => {
            if !args.fp.is_empty() {
                return Err(CliError::Usage(
                    "--fp-* flags apply to --input panels only".into(),
                ));
            }
            let cfg = parse_cell(
                spec,
                ScenarioConfig::new(2, 30, 0.0).with_seed(DEFAULT_SEED),
            )?;
            if cfg.n_inputs != 2 {
                return Err(CliError::Usage(format!(
                    "isoquants need M=2, scenario has M={}",
                    cfg.n_inputs
                )));
            }
            (generate_sample(&cfg, 0).panel, None)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "either --input or --scenario is required".into(),
            ))
        }
    };

    let lines = build_all(&panel, fp.as_ref())?;
    render_svg(&lines, &panel, &args.svg)?;
    let file = File::create(&args.csv).map_err(output_error(&args.csv))?;
    write_vertices_csv(&lines, BufWriter::new(file))?;
    Ok(())
}
