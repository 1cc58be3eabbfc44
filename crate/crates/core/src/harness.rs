//! Seeded Monte Carlo learning-curve experiments.
//!
//! Each run draws a random quaternion FIR channel, independent uniform
//! 16-Q²AM symbol streams and calibrated noise, trains one QLMS equalizer
//! per transmitted stream, and computes the block Wiener solution on the
//! same data. Per-run squared-error traces are normalized by the reference
//! power and averaged across runs that did not diverge.
//!
//! Every run owns its generators, derived from `(master_seed, run, stream)`:
//! stream 0 draws the channel, streams `1..=n_tx` draw the symbols of each
//! transmitter and stream `n_tx + 1` draws the noise. Results do not depend
//! on the worker count because runs are reduced in run-index order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::adaptive::{run_qlms_stacked, Regressor};
use crate::channel::{
    add_noise, apply_siso, gen_random_channel, gen_random_mimo_channel, mean_power, mimo_superpose,
    noise_variance_for_snr, ChannelModel, MimoChannelModel, SeededRng,
};
use crate::error::{Error, Result};
use crate::linalg::dot_left_unchecked;
use crate::modem::{demodulate, Symbol};
use crate::quaternion::Quaternion;
use crate::wiener::{estimate_statistics_multi, evaluate_mse_stacked, solve_wiener_default, to_db};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Siso,
    Mimo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Siso => "siso",
            Mode::Mimo => "mimo",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "siso" => Ok(Mode::Siso),
            "mimo" => Ok(Mode::Mimo),
            _ => Err(Error::Config(format!("unknown mode `{s}` (expected siso or mimo)"))),
        }
    }
}

/// Where the SNR is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SnrReference {
    /// Relative to the noiseless channel output.
    Receiver,
    /// Relative to the transmitted symbol power.
    Transmitter,
}

impl fmt::Display for SnrReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrReference::Receiver => "receiver",
            SnrReference::Transmitter => "transmitter",
        })
    }
}

impl FromStr for SnrReference {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "receiver" => Ok(SnrReference::Receiver),
            "transmitter" => Ok(SnrReference::Transmitter),
            _ => Err(Error::Config(format!("unknown SNR reference `{s}` (expected receiver or transmitter)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub num_channel_taps: usize,
    pub equalizer_length: usize,
    /// `f64::INFINITY` turns the noise off.
    pub snr_db: f64,
    pub snr_reference_point: SnrReference,
    pub num_runs: usize,
    pub symbols_per_run: usize,
    pub step_size: f64,
    pub delay: usize,
    pub master_seed: u64,
    pub normalize_channel: bool,
    pub mimo_tx: usize,
    pub mimo_rx: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Siso,
            num_channel_taps: 4,
            equalizer_length: 15,
            snr_db: 20.0,
            snr_reference_point: SnrReference::Receiver,
            num_runs: 200,
            symbols_per_run: 5000,
            step_size: 0.01,
            delay: 7,
            master_seed: 0,
            normalize_channel: true,
            mimo_tx: 2,
            mimo_rx: 2,
        }
    }
}

/// Keys of the flat `key=value` config format, in emission order.
pub const CONFIG_KEYS: [&str; 13] = [
    "mode",
    "num_channel_taps",
    "equalizer_length",
    "snr_db",
    "snr_reference_point",
    "num_runs",
    "symbols_per_run",
    "step_size",
    "delay",
    "master_seed",
    "normalize_channel",
    "mimo_tx",
    "mimo_rx",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

pub fn parse_switch(value: &str) -> Result<bool> {
    match value {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(Error::Config(format!("invalid switch `{value}` (expected on or off)"))),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_channel_taps", self.num_channel_taps),
            ("equalizer_length", self.equalizer_length),
            ("num_runs", self.num_runs),
            ("symbols_per_run", self.symbols_per_run),
            ("mimo_tx", self.mimo_tx),
            ("mimo_rx", self.mimo_rx),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be at least 1")));
            }
        }
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::Config(format!("`step_size` must be positive, got {}", self.step_size)));
        }
        if self.delay >= self.symbols_per_run {
            return Err(Error::Config(format!(
                "`delay` ({}) must be below `symbols_per_run` ({})",
                self.delay, self.symbols_per_run
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::Config(format!("`snr_db` must be a number or inf, got {}", self.snr_db)));
        }
        Ok(())
    }

    /// Sets one field from its textual `key=value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "mode" => self.mode = value.parse()?,
            "num_channel_taps" => self.num_channel_taps = parse_num(key, value)?,
            "equalizer_length" => self.equalizer_length = parse_num(key, value)?,
            "snr_db" => self.snr_db = parse_num(key, value)?,
            "snr_reference_point" => self.snr_reference_point = value.parse()?,
            "num_runs" => self.num_runs = parse_num(key, value)?,
            "symbols_per_run" => self.symbols_per_run = parse_num(key, value)?,
            "step_size" => self.step_size = parse_num(key, value)?,
            "delay" => self.delay = parse_num(key, value)?,
            "master_seed" => self.master_seed = parse_num(key, value)?,
            "normalize_channel" => self.normalize_channel = parse_switch(value)?,
            "mimo_tx" => self.mimo_tx = parse_num(key, value)?,
            "mimo_rx" => self.mimo_rx = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// `(key, value)` pairs in [`CONFIG_KEYS`] order. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("mode", self.mode.to_string()),
            ("num_channel_taps", self.num_channel_taps.to_string()),
            ("equalizer_length", self.equalizer_length.to_string()),
            ("snr_db", self.snr_db.to_string()),
            ("snr_reference_point", self.snr_reference_point.to_string()),
            ("num_runs", self.num_runs.to_string()),
            ("symbols_per_run", self.symbols_per_run.to_string()),
            ("step_size", self.step_size.to_string()),
            ("delay", self.delay.to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("normalize_channel", if self.normalize_channel { "on" } else { "off" }.to_string()),
            ("mimo_tx", self.mimo_tx.to_string()),
            ("mimo_rx", self.mimo_rx.to_string()),
        ]
    }

    pub fn to_kv(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Applies `key=value` lines on top of `self` and returns the keys that
    /// were set. Blank lines and lines starting with `#` are skipped;
    /// unknown keys are rejected.
    pub fn apply_kv(&mut self, text: &str) -> Result<Vec<String>> {
        let mut keys = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
            self.set(k, v)?;
            keys.push(k.trim().to_string());
        }
        Ok(keys)
    }

    /// Parses a full config over the defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    fn link_shape(&self) -> (usize, usize) {
        match self.mode {
            Mode::Siso => (1, 1),
            Mode::Mimo => (self.mimo_rx, self.mimo_tx),
        }
    }
}

/// Averaged learning curve of one transmitted stream.
#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve {
    /// Run-averaged normalized squared error per iteration, in dB.
    pub mse_db: Vec<f64>,
    /// dB value of the linear mean over the final 10% of iterations.
    pub steady_state_db: f64,
    pub runs_diverged: usize,
    pub runs_averaged: usize,
}

/// Outcome of one stream of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamRecord {
    /// Normalized squared-error trace; `None` if QLMS diverged.
    pub trace: Option<Vec<f64>>,
    /// Normalized QLMS MSE over the final quarter of the run, in dB.
    pub qlms_final_quarter_db: Option<f64>,
    /// Normalized in-sample MSE of the block Wiener solution, linear.
    pub wiener_mse: f64,
    pub wiener_mse_db: f64,
    pub symbol_errors: usize,
    pub symbols_decided: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub streams: Vec<StreamRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamResult {
    pub curve: LearningCurve,
    /// dB of the run-averaged normalized Wiener MSE.
    pub wiener_mse_db: f64,
    /// Post-convergence symbol error rate of the final QLMS weights.
    pub ser: f64,
    pub symbol_errors: usize,
    pub symbols_decided: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub streams: Vec<StreamResult>,
    pub runs: Vec<RunRecord>,
}

/// Generated data for one run.
#[derive(Clone, Debug)]
pub struct TrialData {
    pub transmitted: Vec<Vec<Symbol>>,
    pub received: Vec<Vec<Quaternion>>,
    pub noise_variance_per_component: f64,
}

fn symbol_values(s: &[Symbol]) -> Vec<Quaternion> {
    s.iter().map(|s| s.value()).collect()
}

fn noise_variance(cfg: &ExperimentConfig, noiseless: &[Vec<Quaternion>], tx: &[Vec<Quaternion>]) -> Result<f64> {
    if cfg.snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    let streams = match cfg.snr_reference_point {
        SnrReference::Receiver => noiseless,
        SnrReference::Transmitter => tx,
    };
    let power = streams.iter().map(|s| mean_power(s)).sum::<f64>() / streams.len() as f64;
    noise_variance_for_snr(power, cfg.snr_db)
}

/// Draws the channel, symbols and noise of run `run`.
pub fn simulate_trial(cfg: &ExperimentConfig, run: usize) -> Result<TrialData> {
    simulate_trial_on(cfg, run, None)
}

/// Like [`simulate_trial`] but with `channel` in place of a random draw
/// (its noise variance is ignored; noise follows the configured SNR).
pub fn simulate_trial_on(cfg: &ExperimentConfig, run: usize, channel: Option<&MimoChannelModel>) -> Result<TrialData> {
    let run = run as u64;
    let (n_rx, n_tx) = match channel {
        Some(ch) => (ch.num_rx(), ch.num_tx()),
        None => cfg.link_shape(),
    };
    if cfg.mode == Mode::Siso && (n_rx, n_tx) != (1, 1) {
        return Err(Error::Config(format!("siso mode needs a 1x1 channel, got {n_rx}x{n_tx}")));
    }
    let mut chan_rng = SeededRng::derive(cfg.master_seed, run, 0);
    let transmitted: Vec<Vec<Symbol>> = (0..n_tx)
        .map(|t| SeededRng::derive(cfg.master_seed, run, 1 + t as u64).symbols(cfg.symbols_per_run))
        .collect();
    let tx_values: Vec<Vec<Quaternion>> = transmitted.iter().map(|s| symbol_values(s)).collect();
    let mut noise_rng = SeededRng::derive(cfg.master_seed, run, 1 + n_tx as u64);

    let (received, variance) = match cfg.mode {
        Mode::Siso => {
            let mut model = match channel {
                Some(ch) => ChannelModel::new(ch.link(0, 0).clone(), 0.0)?,
                None => gen_random_channel(&mut chan_rng, cfg.num_channel_taps, cfg.normalize_channel)?,
            };
            let noiseless = apply_siso(&model, &tx_values[0], &mut noise_rng.clone())?;
            let variance = noise_variance(cfg, std::slice::from_ref(&noiseless), &tx_values)?;
            model = ChannelModel::new(model.taps, variance)?;
            (vec![apply_siso(&model, &tx_values[0], &mut noise_rng)?], variance)
        }
        Mode::Mimo => {
            let model = match channel {
                Some(ch) => ch.clone(),
                None => gen_random_mimo_channel(&mut chan_rng, n_rx, n_tx, cfg.num_channel_taps, cfg.normalize_channel)?,
            };
            let mut received = mimo_superpose(&model, &tx_values)?;
            let variance = noise_variance(cfg, &received, &tx_values)?;
            let model = MimoChannelModel::new(model.grid().to_vec(), variance)?;
            for stream in &mut received {
                add_noise(stream, model.noise_variance_per_component, &mut noise_rng)?;
            }
            (received, variance)
        }
    };
    Ok(TrialData { transmitted, received, noise_variance_per_component: variance })
}

/// Trains one stacked-regressor QLMS equalizer per transmitted stream and
/// the matching block Wiener filters on the same received data.
pub fn equalize_trial(
    received: &[Vec<Quaternion>],
    transmitted: &[Vec<Symbol>],
    lags_per_stream: usize,
    step_size: f64,
    delay: usize,
) -> Result<Vec<StreamRecord>> {
    let streams: Vec<&[Quaternion]> = received.iter().map(Vec::as_slice).collect();
    let references: Vec<Vec<Quaternion>> = transmitted.iter().map(|s| symbol_values(s)).collect();
    let ref_slices: Vec<&[Quaternion]> = references.iter().map(Vec::as_slice).collect();
    let problems = estimate_statistics_multi(&streams, &ref_slices, lags_per_stream, delay)?;

    let mut out = Vec::with_capacity(transmitted.len());
    for ((reference, symbols), problem) in references.iter().zip(transmitted).zip(&problems) {
        let w_opt = solve_wiener_default(problem)?;
        let wiener = evaluate_mse_stacked(&w_opt, &streams, reference, lags_per_stream, delay)?;
        let wiener_mse = wiener.linear / wiener.reference_power;

        let record = match run_qlms_stacked(&streams, reference, lags_per_stream, step_size, delay) {
            Ok(run) => {
                let power = wiener.reference_power;
                let trace: Vec<f64> = run.trace.iter().map(|j| j / power).collect();
                let quarter = &trace[trace.len() - (trace.len() / 4).max(1)..];
                let final_quarter = quarter.iter().sum::<f64>() / quarter.len() as f64;

                let n_total = streams[0].len();
                let start = delay + (n_total - delay) / 2;
                let mut x = Regressor::stacked(&streams, start, lags_per_stream);
                let mut errors = 0;
                for n in start..n_total {
                    x.fill(&streams, n, lags_per_stream);
                    let decided = demodulate(dot_left_unchecked(run.state.weights(), x.as_slice()));
                    errors += usize::from(decided != symbols[n - delay]);
                }
                StreamRecord {
                    trace: Some(trace),
                    qlms_final_quarter_db: Some(to_db(final_quarter, 1.0)),
                    wiener_mse,
                    wiener_mse_db: to_db(wiener_mse, 1.0),
                    symbol_errors: errors,
                    symbols_decided: n_total - start,
                }
            }
            Err(Error::Diverged { .. }) => StreamRecord {
                trace: None,
                qlms_final_quarter_db: None,
                wiener_mse,
                wiener_mse_db: to_db(wiener_mse, 1.0),
                symbol_errors: 0,
                symbols_decided: 0,
            },
            Err(e) => return Err(e),
        };
        out.push(record);
    }
    Ok(out)
}

fn run_one(cfg: &ExperimentConfig, run: usize, channel: Option<&MimoChannelModel>) -> Result<RunRecord> {
    let trial = simulate_trial_on(cfg, run, channel)?;
    let streams = equalize_trial(&trial.received, &trial.transmitted, cfg.equalizer_length, cfg.step_size, cfg.delay)?;
    Ok(RunRecord { run, streams })
}

fn aggregate(cfg: &ExperimentConfig, runs: Vec<RunRecord>) -> Result<ExperimentResult> {
    let n_streams = runs.first().map_or(0, |r| r.streams.len());
    let len = cfg.symbols_per_run - cfg.delay;
    let mut streams = Vec::with_capacity(n_streams);
    for t in 0..n_streams {
        let mut sum = vec![0.0; len];
        let (mut averaged, mut diverged) = (0, 0);
        let (mut wiener_sum, mut errors, mut decided) = (0.0, 0, 0);
        for run in &runs {
            let rec = &run.streams[t];
            match &rec.trace {
                Some(trace) => {
                    for (s, v) in sum.iter_mut().zip(trace) {
                        *s += v;
                    }
                    averaged += 1;
                    wiener_sum += rec.wiener_mse;
                    errors += rec.symbol_errors;
                    decided += rec.symbols_decided;
                }
                None => diverged += 1,
            }
        }
        if averaged == 0 {
            return Err(Error::ExperimentFailed(format!(
                "all {} runs diverged on stream {t}; lower the step size (currently {})",
                runs.len(),
                cfg.step_size
            )));
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / averaged as f64).collect();
        let tail = (len / 10).max(1);
        let steady = mean[len - tail..].iter().sum::<f64>() / tail as f64;
        streams.push(StreamResult {
            curve: LearningCurve {
                mse_db: mean.iter().map(|v| to_db(*v, 1.0)).collect(),
                steady_state_db: to_db(steady, 1.0),
                runs_diverged: diverged,
                runs_averaged: averaged,
            },
            wiener_mse_db: to_db(wiener_sum / averaged as f64, 1.0),
            ser: errors as f64 / decided as f64,
            symbol_errors: errors,
            symbols_decided: decided,
        });
    }
    Ok(ExperimentResult { config: cfg.clone(), streams, runs })
}

/// Runs the configured experiment on the global rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_batch(cfg, None)
}

/// Runs every trial over the same fixed channel instead of random draws.
pub fn run_experiment_on_channel(cfg: &ExperimentConfig, channel: &MimoChannelModel) -> Result<ExperimentResult> {
    run_batch(cfg, Some(channel))
}

fn run_batch(cfg: &ExperimentConfig, channel: Option<&MimoChannelModel>) -> Result<ExperimentResult> {
    cfg.validate()?;
    let runs = (0..cfg.num_runs)
        .into_par_iter()
        .map(|run| run_one(cfg, run, channel))
        .collect::<Result<Vec<_>>>()?;
    aggregate(cfg, runs)
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

pub fn run_siso_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.mode != Mode::Siso {
        return Err(Error::Config("run_siso_experiment needs mode=siso".into()));
    }
    run_experiment(cfg)
}

pub fn run_mimo_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.mode != Mode::Mimo {
        return Err(Error::Config("run_mimo_experiment needs mode=mimo".into()));
    }
    run_experiment(cfg)
}

/// Trailing window used to smooth a learning curve before locating
/// convergence: 1% of the curve, at least one sample.
pub fn smoothing_window(len: usize) -> usize {
    (len / 100).max(1)
}

/// First index at which the smoothed curve is within 1 dB of
/// `steady_state_db`. Smoothing averages the linear values over a trailing
/// [`smoothing_window`].
pub fn convergence_iteration(mse_db: &[f64], steady_state_db: f64) -> Option<usize> {
    let w = smoothing_window(mse_db.len());
    let linear: Vec<f64> = mse_db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let mut acc = 0.0;
    for (i, v) in linear.iter().enumerate() {
        acc += v;
        if i >= w {
            acc -= linear[i - w];
        }
        let n = (i + 1).min(w) as f64;
        if (to_db(acc / n, 1.0) - steady_state_db).abs() <= 1.0 {
            return Some(i);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamSummary {
    pub steady_state_db: f64,
    /// `None` when the smoothed curve never settles within 1 dB.
    pub convergence_iteration: Option<usize>,
    pub ser: f64,
    pub wiener_mse_db: f64,
    pub runs_diverged: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub streams: Vec<StreamSummary>,
}

impl Summary {
    /// Stream with the highest steady-state MSE; the headline numbers of a
    /// MIMO summary come from it.
    pub fn worst(&self) -> &StreamSummary {
        self.streams
            .iter()
            .max_by(|a, b| a.steady_state_db.total_cmp(&b.steady_state_db))
            .expect("summary has at least one stream")
    }
}

pub fn summarize(streams: &[StreamResult]) -> Result<Summary> {
    if streams.is_empty() {
        return Err(Error::InsufficientData("no stream results to summarize".into()));
    }
    let streams = streams
        .iter()
        .map(|s| {
            if s.curve.mse_db.is_empty() {
                return Err(Error::InsufficientData("empty learning curve".into()));
            }
            Ok(StreamSummary {
                steady_state_db: s.curve.steady_state_db,
                convergence_iteration: convergence_iteration(&s.curve.mse_db, s.curve.steady_state_db),
                ser: s.ser,
                wiener_mse_db: s.wiener_mse_db,
                runs_diverged: s.curve.runs_diverged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary { streams })
}
