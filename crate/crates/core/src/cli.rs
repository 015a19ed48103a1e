//! Batch runner behind the `hfstable` binary.
//!
//! Every command reads at most one input file, writes its artifacts into
//! the output directory, and finishes with a `run.json` manifest holding
//! the full configuration, so `hfstable replay --input out/run.json`
//! repeats the run. All randomness derives from `--seed` through
//! [`crate::seed::derive`] with one label per stage (`simulate`,
//! `ticks`, `bootstrap`).
//!
//! | command      | input            | artifacts                                              |
//! |--------------|------------------|--------------------------------------------------------|
//! | `ingest`     | ticks or daily   | `returns.csv`, `ingest.json`                           |
//! | `fit`        | any              | `fit.json`                                             |
//! | `trajectory` | any              | `trajectory.csv`, `trajectory.json`                    |
//! | `crossover`  | any              | `trajectory.csv`, `crossover.json`                     |
//! | `acf`        | any              | `acf.csv`, `abs_acf.csv`, `acf.json`                   |
//! | `simulate`   | none             | `returns.csv` (and `ticks.csv` with `--ticks`)         |
//! | `report`     | any              | all of the above plus `table.csv` and `report.json`    |
//!
//! Input files are recognized by their header: `timestamp,value` (ticks),
//! `date,close` (daily closes) or `return` (returns).

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::autocorr::{abs_acf, acf, persistence_lag, AcfResult};
use crate::crossover::{
    alpha_trajectory, default_levels, detect_crossover, kurtosis_trajectory, level_label,
    table_levels, AlphaTrajectory, CrossoverConfig, CrossoverReport, KurtosisPoint,
};
use crate::error::{Error, Result};
use crate::estimation::{bootstrap_pvalue, fit_stable, ks_test};
use crate::io::{self, BadRow, OnBadRow};
use crate::returns::{dedup_ticks, log_returns, ReturnSeries, SeriesStats, TickSeries};
use crate::seed;
use crate::stable::{sample, StableParams};
use crate::synthetic::{ticks_from_returns, TickConfig};
use crate::tlf::{truncate, SigmaRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Ingest,
    Fit,
    Trajectory,
    Crossover,
    Acf,
    Simulate,
    Report,
}

/// Parameters of the `simulate` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Hard cutoff in sample standard deviations; `None` keeps every draw.
    pub n_std: Option<f64>,
    pub sigma_rule: SigmaRule,
    pub length: usize,
    /// Also write the returns as a tick stream with repeated quotes.
    pub ticks: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            alpha: 1.4,
            beta: 0.0,
            gamma: 1.0,
            delta: 0.0,
            n_std: None,
            sigma_rule: SigmaRule::default(),
            length: 100_000,
            ticks: false,
        }
    }
}

/// Everything a run depends on; echoed into `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub output_path: PathBuf,
    pub seed: u64,
    /// Aggregation levels; `None` means the command's default.
    pub levels: Option<Vec<usize>>,
    pub trading_day_seconds: f64,
    pub thresholds: CrossoverConfig,
    pub significance: f64,
    pub max_lag: usize,
    /// Parametric-bootstrap replicates for the `fit` p-value.
    pub mc_pvalue: Option<usize>,
    pub on_bad_row: OnBadRow,
    /// Seconds between returns for `return` files, which carry no clock.
    pub mean_dt: Option<f64>,
    pub simulate: SimulateConfig,
}

impl RunConfig {
    pub fn new(command: Command, output_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input_path: None,
            output_path: output_path.into(),
            seed: 0,
            levels: None,
            trading_day_seconds: crate::returns::TRADING_DAY_SECONDS,
            thresholds: CrossoverConfig::default(),
            significance: 0.05,
            max_lag: 200,
            mc_pvalue: None,
            on_bad_row: OnBadRow::Fail,
            mean_dt: None,
            simulate: SimulateConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::param(
                "significance",
                format!("{} not in (0, 1)", self.significance),
            ));
        }
        if let Some(levels) = &self.levels {
            if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) || levels[0] == 0 {
                return Err(Error::param(
                    "levels",
                    "must be positive and strictly increasing",
                ));
            }
        }
        if !(self.trading_day_seconds > 0.0) {
            return Err(Error::param("trading_day_seconds", "must be positive"));
        }
        if self.max_lag == 0 {
            return Err(Error::param("max_lag", "must be at least 1"));
        }
        if self.command != Command::Simulate && self.input_path.is_none() {
            return Err(Error::param("input", "this command needs --input"));
        }
        Ok(())
    }

    fn crossover_config(&self) -> CrossoverConfig {
        CrossoverConfig {
            trading_day_seconds: self.trading_day_seconds,
            ..self.thresholds
        }
    }
}

/// Written next to the artifacts of every successful run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub version: String,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub artifacts: Vec<String>,
}

/// Failure description printed to stderr (and written to `error.json` when
/// possible).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub stage: String,
    pub message: String,
    pub line: Option<u64>,
    pub parameter: Option<String>,
}

impl ErrorReport {
    fn new(stage: &str, err: &Error) -> Self {
        let (line, parameter) = match err {
            Error::Parse { line, .. } => (Some(*line), None),
            Error::InvalidParameter { name, .. } => (None, Some(name.to_string())),
            _ => (None, None),
        };
        Self {
            stage: stage.to_string(),
            message: err.to_string(),
            line,
            parameter,
        }
    }
}

/// Command-line flags.
#[derive(Debug, Parser)]
#[command(
    name = "hfstable",
    version,
    about = "Heavy-tailed return analysis: stable fits, aggregation sweeps, crossover and autocorrelation"
)]
pub struct Args {
    /// What to run; `replay` re-executes the run described by `--input run.json`.
    #[arg(value_enum)]
    pub command: CliCommand,
    /// Input CSV (ticks `timestamp,value`, daily `date,close`, or `return`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated aggregation levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1.4)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Hard cutoff for `simulate`, in sample standard deviations.
    #[arg(long)]
    pub n_std: Option<f64>,
    /// `self-consistent` re-cuts until the kept set is within `--n-std` of
    /// its own deviation; `input` cuts once.
    #[arg(long, default_value = "self-consistent")]
    pub sigma_rule: SigmaRule,
    /// Number of simulated returns.
    #[arg(long, default_value_t = 100_000)]
    pub length: usize,
    /// `simulate` also writes a tick stream.
    #[arg(long)]
    pub ticks: bool,
    #[arg(long, default_value_t = 200)]
    pub max_lag: usize,
    #[arg(long, default_value_t = 0.05)]
    pub significance: f64,
    #[arg(long, default_value_t = crate::returns::TRADING_DAY_SECONDS)]
    pub trading_day_seconds: f64,
    /// Parametric-bootstrap p-value for `fit` with this many replicates.
    #[arg(long)]
    pub mc_pvalue: Option<usize>,
    #[arg(long, default_value = "fail")]
    pub on_bad_row: OnBadRow,
    /// Seconds between returns when the input is a `return` file.
    #[arg(long)]
    pub mean_dt: Option<f64>,
    #[arg(long, default_value_t = 1.99)]
    pub alpha_threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    pub kurtosis_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliCommand {
    Ingest,
    Fit,
    Trajectory,
    Crossover,
    Acf,
    Simulate,
    Report,
    Replay,
}

impl Args {
    /// The run configuration; for `replay` it is read from the manifest,
    /// with `--output` overriding the recorded directory when given.
    pub fn into_config(self, output_given: bool) -> Result<RunConfig> {
        let command = match self.command {
            CliCommand::Replay => {
                let path = self
                    .input
                    .ok_or_else(|| Error::param("input", "replay needs --input run.json"))?;
                let text = fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let manifest: RunManifest =
                    serde_json::from_str(&text).map_err(|e| Error::Parse {
                        line: e.line() as u64,
                        message: e.to_string(),
                    })?;
                let mut config = manifest.config;
                if output_given {
                    config.output_path = self.output;
                }
                return Ok(config);
            }
            CliCommand::Ingest => Command::Ingest,
            CliCommand::Fit => Command::Fit,
            CliCommand::Trajectory => Command::Trajectory,
            CliCommand::Crossover => Command::Crossover,
            CliCommand::Acf => Command::Acf,
            CliCommand::Simulate => Command::Simulate,
            CliCommand::Report => Command::Report,
        };
        Ok(RunConfig {
            command,
            input_path: self.input,
            output_path: self.output,
            seed: self.seed,
            levels: self.levels,
            trading_day_seconds: self.trading_day_seconds,
            thresholds: CrossoverConfig {
                alpha_threshold: self.alpha_threshold,
                kurtosis_fraction: self.kurtosis_fraction,
                trading_day_seconds: self.trading_day_seconds,
            },
            significance: self.significance,
            max_lag: self.max_lag,
            mc_pvalue: self.mc_pvalue,
            on_bad_row: self.on_bad_row,
            mean_dt: self.mean_dt,
            simulate: SimulateConfig {
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
                delta: self.delta,
                n_std: self.n_std,
                sigma_rule: self.sigma_rule,
                length: self.length,
                ticks: self.ticks,
            },
        })
    }
}

/// Parses `argv`, runs, reports errors; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let output_given = argv
        .iter()
        .any(|a| a == "--output" || a.to_string_lossy().starts_with("--output="));
    let args = match Args::try_parse_from(&argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = match args.into_config(output_given) {
        Ok(c) => c,
        Err(e) => return report_error(None, "config", &e),
    };
    match run(&config) {
        Ok(_) => 0,
        Err((stage, e)) => report_error(Some(&config.output_path), stage, &e),
    }
}

fn report_error(dir: Option<&Path>, stage: &str, err: &Error) -> i32 {
    let report = ErrorReport::new(stage, err);
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    eprintln!("{json}");
    if let Some(dir) = dir {
        if fs::create_dir_all(dir).is_ok() {
            let _ = fs::write(dir.join("error.json"), json + "\n");
        }
    }
    1
}

/// Runs one command. On failure returns the stage that failed.
pub fn run(config: &RunConfig) -> std::result::Result<RunManifest, (&'static str, Error)> {
    let started = Instant::now();
    config.validate().map_err(|e| ("config", e))?;
    fs::create_dir_all(&config.output_path).map_err(|e| {
        (
            "output",
            Error::Io(format!("{}: {e}", config.output_path.display())),
        )
    })?;
    let mut out = Artifacts::new(&config.output_path);
    match config.command {
        Command::Simulate => simulate(config, &mut out)?,
        Command::Ingest => {
            let data = load(config)?;
            write_ingest(&data, &mut out).map_err(|e| ("write", e))?;
        }
        Command::Fit => {
            let data = load(config)?;
            fit(config, &data.series, &mut out)?;
        }
        Command::Trajectory => {
            let data = load(config)?;
            let levels = config.levels.clone().unwrap_or_else(default_levels);
            let (traj, kurt) = sweep(config, &data.series, &levels)?;
            write_trajectory_csv(
                &traj,
                &kurt,
                config.significance,
                &mut out,
                "trajectory.csv",
            )
            .map_err(|e| ("write", e))?;
            out.json("trajectory.json", &TrajectoryDoc::new(&traj, &kurt))
                .map_err(|e| ("write", e))?;
        }
        Command::Crossover => {
            let data = load(config)?;
            let levels = config.levels.clone().unwrap_or_else(default_levels);
            let (traj, kurt) = sweep(config, &data.series, &levels)?;
            write_trajectory_csv(
                &traj,
                &kurt,
                config.significance,
                &mut out,
                "trajectory.csv",
            )
            .map_err(|e| ("write", e))?;
            let doc = CrossoverDoc::new(detect_crossover(&traj, &kurt, &config.crossover_config()));
            out.json("crossover.json", &doc).map_err(|e| ("write", e))?;
        }
        Command::Acf => {
            let data = load(config)?;
            write_acf(config, &data.series, &mut out)?;
        }
        Command::Report => report(config, &mut out)?,
    }
    let manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        artifacts: out.written.clone(),
    };
    out.json("run.json", &manifest).map_err(|e| ("write", e))?;
    Ok(manifest)
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    fn create(&mut self, name: &str) -> Result<fs::File> {
        let path = self.dir.join(name);
        if name != "run.json" {
            self.written.push(name.to_string());
        }
        fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut f = self.create(name)?;
        serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Io(e.to_string()))?;
        f.write_all(b"\n")?;
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let f = self.create(name)?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(f));
        let err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Loaded input: the raw return series plus what ingestion saw.
struct Loaded {
    series: ReturnSeries,
    ticks_read: Option<usize>,
    ticks_kept: Option<usize>,
    skipped: Vec<BadRow>,
}

#[derive(Clone, Copy)]
enum InputKind {
    Ticks,
    Daily,
    Returns,
}

fn sniff(path: &Path) -> Result<InputKind> {
    let f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut first = String::new();
    BufReader::new(f).read_line(&mut first)?;
    let header: Vec<String> = first
        .trim()
        .split(',')
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    match header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["timestamp", "value"] => Ok(InputKind::Ticks),
        ["date", "close"] => Ok(InputKind::Daily),
        ["return"] => Ok(InputKind::Returns),
        _ => Err(Error::Parse {
            line: 1,
            message: format!(
                "unrecognized header `{}`; expected `timestamp,value`, `date,close` or `return`",
                first.trim()
            ),
        }),
    }
}

fn load(config: &RunConfig) -> std::result::Result<Loaded, (&'static str, Error)> {
    let path = config
        .input_path
        .as_deref()
        .ok_or(("input", Error::param("input", "missing")))?;
    let kind = sniff(path).map_err(|e| ("input", e))?;
    let from_ticks = |ticks: io::Ingested<TickSeries>| -> Result<Loaded> {
        let read = ticks.data.len();
        let kept = dedup_ticks(&ticks.data)?;
        Ok(Loaded {
            series: log_returns(&kept)?,
            ticks_read: Some(read),
            ticks_kept: Some(kept.len()),
            skipped: ticks.skipped,
        })
    };
    let loaded = match kind {
        InputKind::Ticks => io::read_ticks_file(path, config.on_bad_row).and_then(from_ticks),
        InputKind::Daily => io::read_daily_file(path, config.on_bad_row).and_then(from_ticks),
        InputKind::Returns => {
            io::read_returns_file(path, config.on_bad_row, config.mean_dt).map(|r| Loaded {
                series: r.data,
                ticks_read: None,
                ticks_kept: None,
                skipped: r.skipped,
            })
        }
    };
    loaded.map_err(|e| ("input", e))
}

#[derive(Serialize)]
struct IngestDoc<'a> {
    ticks_read: Option<usize>,
    ticks_after_dedup: Option<usize>,
    returns: usize,
    stats: Option<SeriesStats>,
    skipped_rows: &'a [BadRow],
}

fn write_ingest(data: &Loaded, out: &mut Artifacts) -> Result<()> {
    let f = out.create("returns.csv")?;
    io::write_returns(std::io::BufWriter::new(f), data.series.returns())?;
    out.json(
        "ingest.json",
        &IngestDoc {
            ticks_read: data.ticks_read,
            ticks_after_dedup: data.ticks_kept,
            returns: data.series.len(),
            stats: data.series.stats().ok(),
            skipped_rows: &data.skipped,
        },
    )
}

#[derive(Serialize)]
struct FitDoc {
    n_conv: String,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    ks: f64,
    p: f64,
    reject: bool,
    significance: f64,
    sample_size: usize,
    mc_p_value: Option<f64>,
    mc_replicates: Option<usize>,
}

fn fit(
    config: &RunConfig,
    series: &ReturnSeries,
    out: &mut Artifacts,
) -> std::result::Result<(), (&'static str, Error)> {
    let xs = series.returns();
    let params = fit_stable(xs).map_err(|e| ("fit", e))?;
    let ks = ks_test(xs, &params, config.significance).map_err(|e| ("ks", e))?;
    let mc = match config.mc_pvalue {
        Some(b) => Some(
            bootstrap_pvalue(
                ks.statistic,
                xs.len(),
                &params,
                b,
                seed::derive(config.seed, "bootstrap", 0),
            )
            .map_err(|e| ("bootstrap", e))?,
        ),
        None => None,
    };
    let doc = FitDoc {
        n_conv: level_label(series.n_conv()),
        alpha: params.alpha(),
        beta: params.beta(),
        gamma: params.gamma(),
        delta: params.delta(),
        ks: ks.statistic,
        p: ks.p_value,
        reject: ks.reject,
        significance: config.significance,
        sample_size: xs.len(),
        mc_p_value: mc,
        mc_replicates: config.mc_pvalue,
    };
    out.json("fit.json", &doc).map_err(|e| ("write", e))
}

fn sweep(
    config: &RunConfig,
    series: &ReturnSeries,
    levels: &[usize],
) -> std::result::Result<(AlphaTrajectory, Vec<KurtosisPoint>), (&'static str, Error)> {
    let label = config
        .input_path
        .as_ref()
        .map_or_else(|| "simulated".to_string(), |p| p.display().to_string());
    let traj = alpha_trajectory(series, levels, config.significance, &label)
        .map_err(|e| ("trajectory", e))?;
    let kurt = kurtosis_trajectory(series, levels).map_err(|e| ("kurtosis", e))?;
    Ok((traj, kurt))
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e7).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn fit_row(p: &crate::estimation::FitResult, significance: f64) -> Vec<String> {
    vec![
        level_label(p.n_conv),
        num(p.params.alpha()),
        num(p.params.beta()),
        num(p.params.gamma()),
        num(p.params.delta()),
        num(p.ks_statistic),
        num(p.p_value),
        p.rejects_at(significance).to_string(),
    ]
}

fn write_trajectory_csv(
    traj: &AlphaTrajectory,
    kurt: &[KurtosisPoint],
    significance: f64,
    out: &mut Artifacts,
    name: &str,
) -> Result<()> {
    let rows = traj.points.iter().map(|p| {
        let mut row = fit_row(p, significance);
        let k = kurt
            .iter()
            .find(|k| k.n_conv == p.n_conv)
            .map_or_else(String::new, |k| num(k.excess_kurtosis));
        row.push(k);
        row
    });
    out.csv(
        name,
        &[
            "n_conv", "alpha", "beta", "gamma", "delta", "ks", "p", "reject", "kurtosis",
        ],
        rows,
    )
}

fn write_table_csv(
    traj: &AlphaTrajectory,
    levels: &[usize],
    significance: f64,
    out: &mut Artifacts,
) -> Result<()> {
    let rows = traj
        .points
        .iter()
        .filter(|p| levels.contains(&p.n_conv))
        .map(|p| fit_row(p, significance));
    out.csv(
        "table.csv",
        &[
            "n_conv", "alpha", "beta", "gamma", "delta", "ks", "p", "reject",
        ],
        rows,
    )
}

#[derive(Serialize)]
struct TrajectoryDoc<'a> {
    source_label: &'a str,
    mean_dt: Option<f64>,
    skipped_levels: &'a [usize],
    rows: Vec<TrajectoryRow>,
}

#[derive(Serialize)]
struct TrajectoryRow {
    n_conv: String,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    ks: f64,
    p: f64,
    reject: bool,
    sample_size: usize,
    kurtosis: Option<f64>,
}

impl<'a> TrajectoryDoc<'a> {
    fn new(traj: &'a AlphaTrajectory, kurt: &[KurtosisPoint]) -> Self {
        Self {
            source_label: &traj.source_label,
            mean_dt: traj.mean_dt,
            skipped_levels: &traj.skipped,
            rows: traj
                .points
                .iter()
                .map(|p| TrajectoryRow {
                    n_conv: level_label(p.n_conv),
                    alpha: p.params.alpha(),
                    beta: p.params.beta(),
                    gamma: p.params.gamma(),
                    delta: p.params.delta(),
                    ks: p.ks_statistic,
                    p: p.p_value,
                    reject: p.reject_at_5pct,
                    sample_size: p.sample_size,
                    kurtosis: kurt
                        .iter()
                        .find(|k| k.n_conv == p.n_conv)
                        .map(|k| k.excess_kurtosis),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct CrossoverDoc {
    crossover: Option<CrossoverReport>,
    /// Why no crossover was found, when none was.
    reason: Option<String>,
}

impl CrossoverDoc {
    fn new(found: Result<CrossoverReport>) -> Self {
        match found {
            Ok(r) => Self {
                crossover: Some(r),
                reason: None,
            },
            Err(e) => Self {
                crossover: None,
                reason: Some(e.to_string()),
            },
        }
    }
}

#[derive(Serialize)]
struct AcfDoc {
    n: usize,
    max_lag: usize,
    band: f64,
    persistence_lag: usize,
    persistence_seconds: Option<f64>,
    abs_persistence_lag: Option<usize>,
    abs_persistence_seconds: Option<f64>,
    /// Why the absolute-return correlation is missing, when it is.
    abs_error: Option<String>,
}

fn acf_rows(r: &AcfResult) -> impl Iterator<Item = Vec<String>> + '_ {
    r.lags
        .iter()
        .zip(&r.coefficients)
        .map(|(l, c)| vec![l.to_string(), num(*c), num(r.band)])
}

fn write_acf(
    config: &RunConfig,
    series: &ReturnSeries,
    out: &mut Artifacts,
) -> std::result::Result<AcfDoc, (&'static str, Error)> {
    let max_lag = config.max_lag.min(series.len().saturating_sub(1)).max(1);
    let plain = acf(series, max_lag).map_err(|e| ("acf", e))?;
    let absolute = abs_acf(series, max_lag);
    let header = ["lag", "coefficient", "band"];
    out.csv("acf.csv", &header, acf_rows(&plain))
        .map_err(|e| ("write", e))?;
    if let Ok(a) = &absolute {
        out.csv("abs_acf.csv", &header, acf_rows(a))
            .map_err(|e| ("write", e))?;
    }
    let dt = series.mean_dt();
    let lag = persistence_lag(&plain);
    let abs_lag = absolute.as_ref().ok().map(persistence_lag);
    let doc = AcfDoc {
        n: plain.n,
        max_lag,
        band: plain.band,
        persistence_lag: lag,
        persistence_seconds: dt.map(|d| lag as f64 * d),
        abs_persistence_lag: abs_lag,
        abs_persistence_seconds: dt.zip(abs_lag).map(|(d, l)| l as f64 * d),
        abs_error: absolute.err().map(|e| e.to_string()),
    };
    out.json("acf.json", &doc).map_err(|e| ("write", e))?;
    Ok(doc)
}

fn simulate(
    config: &RunConfig,
    out: &mut Artifacts,
) -> std::result::Result<(), (&'static str, Error)> {
    let s = &config.simulate;
    let params =
        StableParams::new(s.alpha, s.beta, s.gamma, s.delta).map_err(|e| ("simulate", e))?;
    let raw = sample(&params, s.length, seed::derive(config.seed, "simulate", 0))
        .map_err(|e| ("simulate", e))?;
    let returns = match s.n_std {
        Some(k) => truncate(&raw, k, s.sigma_rule).map_err(|e| ("truncate", e))?,
        None => raw,
    };
    let f = out.create("returns.csv").map_err(|e| ("write", e))?;
    io::write_returns(std::io::BufWriter::new(f), &returns).map_err(|e| ("write", e))?;
    if s.ticks {
        let ticks = ticks_from_returns(
            &returns,
            &TickConfig::default(),
            seed::derive(config.seed, "ticks", 0),
        )
        .map_err(|e| ("ticks", e))?;
        let f = out.create("ticks.csv").map_err(|e| ("write", e))?;
        io::write_ticks(std::io::BufWriter::new(f), &ticks).map_err(|e| ("write", e))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportDoc {
    ticks_read: Option<usize>,
    ticks_after_dedup: Option<usize>,
    stats: Option<SeriesStats>,
    table_levels: Vec<usize>,
    crossover: CrossoverDoc,
    acf: AcfDoc,
}

/// dedup -> returns -> sweep -> crossover -> autocorrelation.
fn report(
    config: &RunConfig,
    out: &mut Artifacts,
) -> std::result::Result<(), (&'static str, Error)> {
    let data = load(config)?;
    write_ingest(&data, out).map_err(|e| ("write", e))?;
    let table = config.levels.clone().unwrap_or_else(table_levels);
    let mut levels = default_levels();
    levels.extend(&table);
    levels.sort_unstable();
    levels.dedup();
    let (traj, kurt) = sweep(config, &data.series, &levels)?;
    write_table_csv(&traj, &table, config.significance, out).map_err(|e| ("write", e))?;
    write_trajectory_csv(&traj, &kurt, config.significance, out, "trajectory.csv")
        .map_err(|e| ("write", e))?;
    let crossover = CrossoverDoc::new(detect_crossover(&traj, &kurt, &config.crossover_config()));
    out.json("crossover.json", &crossover)
        .map_err(|e| ("write", e))?;
    let acf = write_acf(config, &data.series, out)?;
    out.json(
        "report.json",
        &ReportDoc {
            ticks_read: data.ticks_read,
            ticks_after_dedup: data.ticks_kept,
            stats: data.series.stats().ok(),
            table_levels: table,
            crossover,
            acf,
        },
    )
    .map_err(|e| ("write", e))
}
