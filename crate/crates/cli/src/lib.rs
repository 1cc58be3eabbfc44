//! Argument handling and result files for the `quatlink` binary.
//!
//! Precedence for every experiment parameter is: command-line flag, then
//! `--config` file, then (seed only) the `QUATLINK_SEED` environment
//! variable, then the built-in default.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use quatlink::harness::{ExperimentConfig, ExperimentResult, LearningCurve, Mode, SnrReference, Summary};

/// Line that separates result keys from the config echo in summary and
/// manifest files.
pub const CONFIG_MARKER: &str = "# config";

pub const CSV_HEADER: &str = "iteration,mse_db";

pub const SEED_ENV: &str = "QUATLINK_SEED";

#[derive(Debug, Parser)]
#[command(name = "quatlink", version, about = "Quaternion QLMS equalization and Wiener baselines over 16-Q²AM links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo learning-curve experiment
    Run(RunArgs),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: quatlink::Error| e.to_string())
}

fn parse_snr_ref(s: &str) -> Result<SnrReference, String> {
    s.parse().map_err(|e: quatlink::Error| e.to_string())
}

fn parse_switch(s: &str) -> Result<bool, String> {
    quatlink::harness::parse_switch(s).map_err(|e| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn parse_snr(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if !v.is_nan() && v != f64::NEG_INFINITY => Ok(v),
        _ => Err(format!("`{s}` is not an SNR in dB (use `inf` for no noise)")),
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Link layout: siso or mimo
    #[arg(long, default_value = "siso", value_parser = parse_mode)]
    pub mode: Mode,

    /// Channel taps per link
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub taps: u64,

    /// Equalizer taps per receive stream
    #[arg(long = "eq-len", default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    pub eq_len: u64,

    /// Signal-to-noise ratio in dB; `inf` disables noise
    #[arg(long = "snr-db", default_value = "20", value_parser = parse_snr, allow_hyphen_values = true)]
    pub snr_db: f64,

    /// Where the SNR is referenced: receiver or transmitter
    #[arg(long = "snr-ref", default_value = "receiver", value_parser = parse_snr_ref)]
    pub snr_ref: SnrReference,

    /// Monte Carlo runs to average
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,

    /// Symbols per run
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    pub symbols: u64,

    /// QLMS step size
    #[arg(long, default_value = "0.01", value_parser = parse_positive)]
    pub mu: f64,

    /// Equalization delay in symbols
    #[arg(long, default_value_t = 7)]
    pub delay: u64,

    /// Master seed
    #[arg(long, default_value_t = 0, env = SEED_ENV)]
    pub seed: u64,

    /// Rescale each random channel to unit energy: on or off
    #[arg(long = "normalize-channel", default_value = "on", value_parser = parse_switch, action = clap::ArgAction::Set)]
    pub normalize_channel: bool,

    /// Transmit streams in mimo mode
    #[arg(long = "mimo-tx", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub mimo_tx: u64,

    /// Receive streams in mimo mode
    #[arg(long = "mimo-rx", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub mimo_rx: u64,

    /// Output directory
    #[arg(long, default_value = "results")]
    pub out: PathBuf,

    /// key=value config file applied under the flags [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

/// A fully resolved `run` invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRequest {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub workers: usize,
}

fn usage_error(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg)
}

/// Parses `argv` (program name first) into a run request.
pub fn parse_args<I, T>(argv: I) -> Result<RunRequest, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = Cli::command().try_get_matches_from(argv)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let Command::Run(args) = cli.command;
    let sub = matches.subcommand_matches("run").expect("run is the only subcommand");
    resolve(&args, sub)
}

fn from_cli(sub: &ArgMatches, id: &str) -> bool {
    sub.value_source(id) == Some(ValueSource::CommandLine)
}

fn resolve(args: &RunArgs, sub: &ArgMatches) -> Result<RunRequest, clap::Error> {
    let mut cfg = ExperimentConfig::default();
    let mut from_file = Vec::new();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| usage_error(format!("cannot read --config {}: {e}", path.display())))?;
        from_file = cfg
            .apply_kv(&text)
            .map_err(|e| usage_error(format!("--config {}: {e}", path.display())))?;
    }

    if from_cli(sub, "mode") {
        cfg.mode = args.mode;
    }
    if from_cli(sub, "taps") {
        cfg.num_channel_taps = args.taps as usize;
    }
    if from_cli(sub, "eq_len") {
        cfg.equalizer_length = args.eq_len as usize;
    }
    if from_cli(sub, "snr_db") {
        cfg.snr_db = args.snr_db;
    }
    if from_cli(sub, "snr_ref") {
        cfg.snr_reference_point = args.snr_ref;
    }
    if from_cli(sub, "runs") {
        cfg.num_runs = args.runs as usize;
    }
    if from_cli(sub, "symbols") {
        cfg.symbols_per_run = args.symbols as usize;
    }
    if from_cli(sub, "mu") {
        cfg.step_size = args.mu;
    }
    if from_cli(sub, "delay") {
        cfg.delay = args.delay as usize;
    }
    let seed_in_file = from_file.iter().any(|k| k == "master_seed");
    match sub.value_source("seed") {
        Some(ValueSource::CommandLine) => cfg.master_seed = args.seed,
        Some(ValueSource::EnvVariable) if !seed_in_file => cfg.master_seed = args.seed,
        _ => {}
    }
    if from_cli(sub, "normalize_channel") {
        cfg.normalize_channel = args.normalize_channel;
    }
    if from_cli(sub, "mimo_tx") {
        cfg.mimo_tx = args.mimo_tx as usize;
    }
    if from_cli(sub, "mimo_rx") {
        cfg.mimo_rx = args.mimo_rx as usize;
    }

    cfg.validate().map_err(usage_error)?;
    Ok(RunRequest { config: cfg, out: args.out.clone(), workers: args.workers })
}

/// `learning_curve.csv` for one stream, `learning_curve_streamK.csv` for
/// several.
pub fn learning_curve_file_name(stream: usize, num_streams: usize) -> String {
    if num_streams == 1 {
        "learning_curve.csv".to_string()
    } else {
        format!("learning_curve_stream{stream}.csv")
    }
}

pub fn learning_curve_csv(curve: &LearningCurve) -> String {
    let mut out = String::with_capacity(24 * (curve.mse_db.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, v) in curve.mse_db.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

pub fn emit_learning_curve_csv(curve: &LearningCurve, path: &Path) -> std::io::Result<()> {
    fs::write(path, learning_curve_csv(curve))
}

fn push_stream_keys(out: &mut String, prefix: &str, s: &quatlink::harness::StreamSummary) {
    let conv = s.convergence_iteration.map_or_else(|| "none".to_string(), |i| i.to_string());
    let _ = writeln!(out, "{prefix}steady_state_db={}", s.steady_state_db);
    let _ = writeln!(out, "{prefix}convergence_iteration={conv}");
    let _ = writeln!(out, "{prefix}ser={}", s.ser);
    let _ = writeln!(out, "{prefix}wiener_mse_db={}", s.wiener_mse_db);
    let _ = writeln!(out, "{prefix}runs_diverged={}", s.runs_diverged);
}

/// Flat `key=value` summary. Unprefixed keys describe the worst stream;
/// multi-stream runs add `streamK.` keys for each stream. The config echo
/// follows [`CONFIG_MARKER`].
pub fn summary_text(summary: &Summary, config: &ExperimentConfig) -> String {
    let mut out = String::new();
    push_stream_keys(&mut out, "", summary.worst());
    if summary.streams.len() > 1 {
        for (k, s) in summary.streams.iter().enumerate() {
            push_stream_keys(&mut out, &format!("stream{k}."), s);
        }
    }
    out.push_str(CONFIG_MARKER);
    out.push('\n');
    out.push_str(&config.to_kv());
    out
}

pub fn emit_summary(summary: &Summary, config: &ExperimentConfig, path: &Path) -> std::io::Result<()> {
    fs::write(path, summary_text(summary, config))
}

pub fn manifest_text(config: &ExperimentConfig, timestamp: u64, outputs: &[PathBuf]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "timestamp={timestamp}");
    for p in outputs {
        let _ = writeln!(out, "output={}", p.display());
    }
    out.push_str(CONFIG_MARKER);
    out.push('\n');
    out.push_str(&config.to_kv());
    out
}

/// Reads the config echo of a summary or manifest back.
pub fn parse_config_echo(text: &str) -> quatlink::Result<ExperimentConfig> {
    let echo = text
        .split_once(&format!("{CONFIG_MARKER}\n"))
        .map(|(_, rest)| rest)
        .ok_or_else(|| quatlink::Error::Config("no config echo section".into()))?;
    ExperimentConfig::from_kv(echo)
}

/// Writes every output file for `result` into `dir` and returns their
/// paths, curves first, then `summary.txt` and `manifest.txt`.
pub fn write_outputs(result: &ExperimentResult, summary: &Summary, dir: &Path, timestamp: u64) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let n = result.streams.len();
    let mut paths = Vec::with_capacity(n + 2);
    for (k, s) in result.streams.iter().enumerate() {
        let path = dir.join(learning_curve_file_name(k, n));
        emit_learning_curve_csv(&s.curve, &path)?;
        paths.push(path);
    }
    let summary_path = dir.join("summary.txt");
    emit_summary(summary, &result.config, &summary_path)?;
    paths.push(summary_path);
    let manifest_path = dir.join("manifest.txt");
    paths.push(manifest_path.clone());
    fs::write(&manifest_path, manifest_text(&result.config, timestamp, &paths))?;
    Ok(paths)
}
