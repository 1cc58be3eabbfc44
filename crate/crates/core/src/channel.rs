//! Quaternion FIR channels with additive quaternion Gaussian noise.
//!
//! `y[n] = Σ_m taps[m] · s[n - m] + noise[n]`, taps on the left. Noise is
//! isotropic: four independent zero-mean Gaussian components of equal
//! variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::QVector;
use crate::modem::Symbol;
use crate::quaternion::Quaternion;

/// Deterministic, platform-independent random source.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent generator for one (run, stream) pair of a Monte Carlo
    /// batch.
    pub fn derive(master: u64, run: u64, stream: u64) -> Self {
        let h = splitmix64(splitmix64(splitmix64(master) ^ run) ^ stream.wrapping_mul(0xA24B_AED4_963E_E407));
        Self::new(h)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn symbol(&mut self) -> Symbol {
        Symbol::from_index(self.inner.random_range(0..16u8))
    }

    pub fn symbols(&mut self, n: usize) -> Vec<Symbol> {
        (0..n).map(|_| self.symbol()).collect()
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }
}

/// Single-input single-output channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    pub taps: QVector,
    pub noise_variance_per_component: f64,
}

impl ChannelModel {
    pub fn new(taps: QVector, noise_variance_per_component: f64) -> Result<Self> {
        if taps.iter().all(|t| t.is_zero()) {
            return Err(Error::Domain("channel needs at least one nonzero tap".into()));
        }
        check_variance(noise_variance_per_component)?;
        Ok(Self { taps, noise_variance_per_component })
    }

    /// Σ norm_sq(tap).
    pub fn energy(&self) -> f64 {
        self.taps.energy()
    }
}

/// `grid[r][t]` carries transmit stream `t` to receive stream `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct MimoChannelModel {
    grid: Vec<Vec<QVector>>,
    pub noise_variance_per_component: f64,
}

impl MimoChannelModel {
    pub fn new(grid: Vec<Vec<QVector>>, noise_variance_per_component: f64) -> Result<Self> {
        let n_tx = grid.first().map_or(0, Vec::len);
        if grid.is_empty() || n_tx == 0 {
            return Err(Error::Dimension("MIMO grid must be at least 1x1".into()));
        }
        if grid.iter().any(|row| row.len() != n_tx) {
            return Err(Error::Dimension("ragged MIMO grid".into()));
        }
        let taps = grid[0][0].len();
        if grid.iter().flatten().any(|link| link.len() != taps) {
            return Err(Error::Dimension("MIMO links must share one tap count".into()));
        }
        check_variance(noise_variance_per_component)?;
        Ok(Self { grid, noise_variance_per_component })
    }

    pub fn num_rx(&self) -> usize {
        self.grid.len()
    }

    pub fn num_tx(&self) -> usize {
        self.grid[0].len()
    }

    pub fn num_taps(&self) -> usize {
        self.grid[0][0].len()
    }

    pub fn link(&self, rx: usize, tx: usize) -> &QVector {
        &self.grid[rx][tx]
    }

    pub fn grid(&self) -> &[Vec<QVector>] {
        &self.grid
    }

    /// Same channel with transmit streams `a` and `b` exchanged.
    pub fn swap_tx(&self, a: usize, b: usize) -> Self {
        let mut grid = self.grid.clone();
        for row in &mut grid {
            row.swap(a, b);
        }
        Self { grid, noise_variance_per_component: self.noise_variance_per_component }
    }
}

fn check_variance(v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("noise variance must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// Causal convolution truncated to the input length.
pub fn convolve(signal: &[Quaternion], taps: &[Quaternion]) -> Result<Vec<Quaternion>> {
    if signal.is_empty() || taps.is_empty() {
        return Err(Error::Dimension("convolution needs a nonempty signal and taps".into()));
    }
    Ok((0..signal.len())
        .map(|n| {
            taps.iter()
                .take(n + 1)
                .enumerate()
                .fold(Quaternion::ZERO, |acc, (m, t)| acc + *t * signal[n - m])
        })
        .collect())
}

pub fn gen_gaussian_quaternion(rng: &mut SeededRng, variance_per_component: f64) -> Result<Quaternion> {
    check_variance(variance_per_component)?;
    Ok(gaussian_unchecked(rng, variance_per_component.sqrt()))
}

fn gaussian_unchecked(rng: &mut SeededRng, sigma: f64) -> Quaternion {
    let c: [f64; 4] = std::array::from_fn(|_| rng.standard_normal());
    Quaternion::from_array(c).scale(sigma)
}

/// Gaussian taps with per-component variance `1 / (4 num_taps)`, so the
/// expected channel energy is one. `normalize` rescales to exactly one.
pub fn gen_random_channel(rng: &mut SeededRng, num_taps: usize, normalize: bool) -> Result<ChannelModel> {
    let taps = gen_random_taps(rng, num_taps, normalize)?;
    ChannelModel::new(taps, 0.0)
}

fn gen_random_taps(rng: &mut SeededRng, num_taps: usize, normalize: bool) -> Result<QVector> {
    if num_taps == 0 {
        return Err(Error::Domain("channel needs at least one tap".into()));
    }
    let sigma = (1.0 / (4.0 * num_taps as f64)).sqrt();
    loop {
        let taps = QVector::new((0..num_taps).map(|_| gaussian_unchecked(rng, sigma)).collect())?;
        let energy = taps.energy();
        // an all-zero draw has probability zero, but it would violate the
        // nonzero-tap invariant, so draw again
        if energy == 0.0 {
            continue;
        }
        return Ok(if normalize { taps.scale(1.0 / energy.sqrt()) } else { taps });
    }
}

/// Random `num_rx x num_tx` grid. Every link is drawn like a SISO channel
/// and scaled by `1/sqrt(num_tx)`, so each receive stream sees unit expected
/// channel energy summed over transmitters.
pub fn gen_random_mimo_channel(
    rng: &mut SeededRng,
    num_rx: usize,
    num_tx: usize,
    num_taps: usize,
    normalize: bool,
) -> Result<MimoChannelModel> {
    if num_rx == 0 || num_tx == 0 {
        return Err(Error::Dimension("MIMO grid must be at least 1x1".into()));
    }
    let scale = 1.0 / (num_tx as f64).sqrt();
    let mut grid = Vec::with_capacity(num_rx);
    for _ in 0..num_rx {
        let mut row = Vec::with_capacity(num_tx);
        for _ in 0..num_tx {
            let taps = gen_random_taps(rng, num_taps, normalize)?;
            row.push(if num_tx == 1 { taps } else { taps.scale(scale) });
        }
        grid.push(row);
    }
    MimoChannelModel::new(grid, 0.0)
}

/// Adds one independent Gaussian quaternion per sample.
pub fn add_noise(signal: &mut [Quaternion], variance_per_component: f64, rng: &mut SeededRng) -> Result<()> {
    check_variance(variance_per_component)?;
    if variance_per_component == 0.0 {
        return Ok(());
    }
    let sigma = variance_per_component.sqrt();
    for s in signal {
        *s += gaussian_unchecked(rng, sigma);
    }
    Ok(())
}

pub fn apply_siso(model: &ChannelModel, signal: &[Quaternion], rng: &mut SeededRng) -> Result<Vec<Quaternion>> {
    let mut out = convolve(signal, &model.taps)?;
    add_noise(&mut out, model.noise_variance_per_component, rng)?;
    Ok(out)
}

/// Per-component noise variance that puts the noise `snr_db` below
/// `signal_power` (total quaternion power, i.e. mean `norm_sq`).
pub fn noise_variance_for_snr(signal_power: f64, snr_db: f64) -> Result<f64> {
    if !(signal_power > 0.0) || !signal_power.is_finite() {
        return Err(Error::Domain(format!("signal power must be positive, got {signal_power}")));
    }
    if snr_db.is_nan() {
        return Err(Error::Domain("SNR is NaN".into()));
    }
    let total = signal_power / 10f64.powf(snr_db / 10.0);
    Ok(total / 4.0)
}

/// Mean `norm_sq` of a sequence.
pub fn mean_power(signal: &[Quaternion]) -> f64 {
    if signal.is_empty() {
        return 0.0;
    }
    signal.iter().map(|q| q.norm_sq()).sum::<f64>() / signal.len() as f64
}

/// Noiseless MIMO superposition `Σ_t convolve(signals[t], grid[r][t])`.
pub fn mimo_superpose(model: &MimoChannelModel, signals: &[Vec<Quaternion>]) -> Result<Vec<Vec<Quaternion>>> {
    if signals.len() != model.num_tx() {
        return Err(Error::Dimension(format!(
            "{} input streams for a channel with {} transmitters",
            signals.len(),
            model.num_tx()
        )));
    }
    let len = signals[0].len();
    if signals.iter().any(|s| s.len() != len) {
        return Err(Error::Dimension("input streams differ in length".into()));
    }
    model
        .grid
        .iter()
        .map(|row| {
            let mut acc = vec![Quaternion::ZERO; len];
            for (link, s) in row.iter().zip(signals) {
                for (a, y) in acc.iter_mut().zip(convolve(s, link)?) {
                    *a += y;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Output stream `r` is the superposition over transmitters plus
/// independent noise; noise is drawn stream by stream, sample by sample.
pub fn apply_mimo(
    model: &MimoChannelModel,
    signals: &[Vec<Quaternion>],
    rng: &mut SeededRng,
) -> Result<Vec<Vec<Quaternion>>> {
    let mut out = mimo_superpose(model, signals)?;
    for stream in &mut out {
        add_noise(stream, model.noise_variance_per_component, rng)?;
    }
    Ok(out)
}
