//! Reference-trained quaternion LMS (QLMS) equalizer.
//!
//! The equalizer output is `ŝ[n] = Σ_l w[l] · x[n][l]` with the weights on
//! the left, the error is `e[n] = r[n] - ŝ[n]`, and the update is
//!
//! ```text
//! w[l] <- w[l] + μ · e[n] · conj(x[n][l])
//! ```
//!
//! with the error on the left. That ordering is the steepest-descent
//! direction of `|e|²` under the left-weight convention.

use crate::error::{Error, Result};
use crate::linalg::{dot_left_unchecked, QVector};
use crate::quaternion::Quaternion;

/// Squared error above this multiple of the reference power aborts a run.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Tapped delay line contents. For `S` receive streams and `L` lags per
/// stream the layout is `[x0[n], x0[n-1], .., x0[n-L+1], x1[n], ..]`;
/// samples before time zero read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Regressor {
    samples: Vec<Quaternion>,
}

impl Regressor {
    pub fn new(samples: QVector) -> Self {
        Self { samples: samples.into_vec() }
    }

    pub fn at(signal: &[Quaternion], n: usize, len: usize) -> Self {
        Self::stacked(&[signal], n, len)
    }

    pub fn stacked(streams: &[&[Quaternion]], n: usize, lags_per_stream: usize) -> Self {
        let mut r = Self { samples: vec![Quaternion::ZERO; streams.len() * lags_per_stream] };
        r.fill(streams, n, lags_per_stream);
        r
    }

    pub(crate) fn fill(&mut self, streams: &[&[Quaternion]], n: usize, lags: usize) {
        for (s, stream) in streams.iter().enumerate() {
            let block = &mut self.samples[s * lags..(s + 1) * lags];
            for (l, slot) in block.iter_mut().enumerate() {
                *slot = if l <= n { stream.get(n - l).copied().unwrap_or(Quaternion::ZERO) } else { Quaternion::ZERO };
            }
        }
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Instantaneous cost `J = e · conj(e)`, which is real.
pub fn cost(e: Quaternion) -> f64 {
    (e * e.conj()).real()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualizerState {
    weights: QVector,
    step_size: f64,
}

impl EqualizerState {
    /// Zero-initialized equalizer of `len` taps.
    pub fn new(len: usize, step_size: f64) -> Result<Self> {
        if len == 0 {
            return Err(Error::Dimension("equalizer length must be at least 1".into()));
        }
        Self::with_weights(QVector::zeros(len), step_size)
    }

    pub fn with_weights(weights: QVector, step_size: f64) -> Result<Self> {
        // μ = 0 is allowed so a frozen filter can be traced
        if !(step_size >= 0.0) || !step_size.is_finite() {
            return Err(Error::Domain(format!("step size must be finite and nonnegative, got {step_size}")));
        }
        if !weights.is_finite() {
            return Err(Error::Domain("weights must be finite".into()));
        }
        Ok(Self { weights, step_size })
    }

    pub fn weights(&self) -> &QVector {
        &self.weights
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, x: &Regressor) -> Result<()> {
        if x.len() != self.weights.len() {
            return Err(Error::Dimension(format!(
                "regressor of length {} for {} weights",
                x.len(),
                self.weights.len()
            )));
        }
        Ok(())
    }

    pub fn predict(&self, x: &Regressor) -> Result<Quaternion> {
        self.check(x)?;
        Ok(dot_left_unchecked(&self.weights, &x.samples))
    }

    pub fn error(&self, x: &Regressor, reference: Quaternion) -> Result<Quaternion> {
        Ok(reference - self.predict(x)?)
    }

    /// One QLMS iteration. Returns the a priori error.
    pub fn qlms_step(&mut self, x: &Regressor, reference: Quaternion) -> Result<Quaternion> {
        let e = self.error(x, reference)?;
        self.update(x, e);
        if !self.weights.is_finite() {
            return Err(Error::Diverged { iteration: 0, squared_error: e.norm_sq(), partial_trace: Vec::new() });
        }
        Ok(e)
    }

    #[inline]
    fn update(&mut self, x: &Regressor, e: Quaternion) {
        let g = e.scale(self.step_size);
        for (w, s) in self.weights.iter_mut().zip(&x.samples) {
            *w += g * s.conj();
        }
    }
}

/// Result of a full adaptation pass.
#[derive(Clone, Debug, PartialEq)]
pub struct QlmsRun {
    pub state: EqualizerState,
    /// `|e[n]|²` for `n = warmup, .., N-1`.
    pub trace: Vec<f64>,
    /// Leading iterations without a delayed reference (equal to the delay).
    pub warmup: usize,
}

/// Single-stream QLMS against `reference` delayed by `delay` samples.
pub fn run_qlms(
    signal: &[Quaternion],
    reference: &[Quaternion],
    len: usize,
    step_size: f64,
    delay: usize,
) -> Result<QlmsRun> {
    run_qlms_stacked(&[signal], reference, len, step_size, delay)
}

/// QLMS over a stacked multi-stream regressor (`lags_per_stream` taps per
/// stream, `streams.len() * lags_per_stream` weights in total).
///
/// Iteration `n` trains toward `reference[n - delay]`; the first `delay`
/// iterations have no reference and are skipped.
pub fn run_qlms_stacked(
    streams: &[&[Quaternion]],
    reference: &[Quaternion],
    lags_per_stream: usize,
    step_size: f64,
    delay: usize,
) -> Result<QlmsRun> {
    let n_total = check_block(streams, reference, lags_per_stream, delay)?;
    let mut state = EqualizerState::new(streams.len() * lags_per_stream, step_size)?;

    let used = &reference[..n_total - delay];
    let ref_power = used.iter().map(|q| q.norm_sq()).sum::<f64>() / used.len() as f64;
    let limit = DIVERGENCE_FACTOR * if ref_power > 0.0 { ref_power } else { 1.0 };

    let mut x = Regressor { samples: vec![Quaternion::ZERO; state.len()] };
    let mut trace = Vec::with_capacity(n_total - delay);
    for n in delay..n_total {
        x.fill(streams, n, lags_per_stream);
        let e = reference[n - delay] - dot_left_unchecked(&state.weights, &x.samples);
        let j = e.norm_sq();
        trace.push(j);
        if !(j <= limit) {
            return Err(Error::Diverged { iteration: n, squared_error: j, partial_trace: trace });
        }
        state.update(&x, e);
        if !state.weights.is_finite() {
            return Err(Error::Diverged { iteration: n, squared_error: j, partial_trace: trace });
        }
    }
    Ok(QlmsRun { state, trace, warmup: delay })
}

/// Validates a training block and returns its length.
pub(crate) fn check_block(
    streams: &[&[Quaternion]],
    reference: &[Quaternion],
    lags_per_stream: usize,
    delay: usize,
) -> Result<usize> {
    if streams.is_empty() || lags_per_stream == 0 {
        return Err(Error::Dimension("need at least one stream and one tap".into()));
    }
    let n_total = streams[0].len();
    if streams.iter().any(|s| s.len() != n_total) {
        return Err(Error::Dimension("receive streams differ in length".into()));
    }
    if n_total <= delay {
        return Err(Error::InsufficientData(format!(
            "{n_total} samples leave nothing after a delay of {delay}"
        )));
    }
    if reference.len() < n_total - delay {
        return Err(Error::InsufficientData(format!(
            "reference has {} samples, need {}",
            reference.len(),
            n_total - delay
        )));
    }
    Ok(n_total)
}
