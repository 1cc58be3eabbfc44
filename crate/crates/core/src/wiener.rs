//! Block quaternion Wiener solution.
//!
//! With `R = E{x xᴴ}` and `p = E{x conj(r)}`, the stationary point of
//! `E{|r - wᵀx|²}` under the left-weight convention satisfies
//! `R conj(w) = p`. Expectations are replaced by sample averages over one
//! block; the solve returns `w` itself, conjugation included.

use crate::adaptive::{check_block, Regressor};
use crate::error::{Error, Result};
use crate::linalg::{dot_left_unchecked, solve, QMatrix, QVector};
use crate::quaternion::Quaternion;

/// Normalized MSE values below this are reported at this floor.
pub const MSE_DB_FLOOR: f64 = -100.0;

/// Relative ridge applied by [`solve_wiener_default`].
pub const DEFAULT_RIDGE_RATIO: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct WienerProblem {
    /// Sample autocorrelation of the regressor, Hermitian.
    pub r: QMatrix,
    /// Sample cross-correlation between regressor and reference.
    pub p: QVector,
    pub sample_count: usize,
}

impl WienerProblem {
    /// `1e-8 · trace(R) / L`.
    pub fn default_ridge(&self) -> f64 {
        DEFAULT_RIDGE_RATIO * self.r.trace().real() / self.r.rows() as f64
    }
}

/// Sample statistics for a single-stream equalizer of `len` taps.
pub fn estimate_statistics(
    signal: &[Quaternion],
    reference: &[Quaternion],
    len: usize,
    delay: usize,
) -> Result<WienerProblem> {
    let mut v = estimate_statistics_multi(&[signal], &[reference], len, delay)?;
    Ok(v.pop().expect("one reference in, one problem out"))
}

/// Shares one autocorrelation estimate across several references, as for
/// the per-stream equalizers of a MIMO receiver.
pub fn estimate_statistics_multi(
    streams: &[&[Quaternion]],
    references: &[&[Quaternion]],
    lags_per_stream: usize,
    delay: usize,
) -> Result<Vec<WienerProblem>> {
    if references.is_empty() {
        return Err(Error::Dimension("no reference streams".into()));
    }
    let mut n_total = 0;
    for r in references {
        n_total = check_block(streams, r, lags_per_stream, delay)?;
    }
    let dim = streams.len() * lags_per_stream;
    let count = n_total - delay;

    let mut acc = vec![Quaternion::ZERO; dim * dim];
    let mut cross = vec![vec![Quaternion::ZERO; dim]; references.len()];
    let mut x = Regressor::stacked(streams, 0, lags_per_stream);
    for n in delay..n_total {
        x.fill(streams, n, lags_per_stream);
        let xs = x.as_slice();
        for r in 0..dim {
            let xr = xs[r];
            let row = &mut acc[r * dim..(r + 1) * dim];
            for c in r..dim {
                row[c] += xr * xs[c].conj();
            }
        }
        for (p, reference) in cross.iter_mut().zip(references) {
            let rc = reference[n - delay].conj();
            for (pl, xl) in p.iter_mut().zip(xs) {
                *pl += *xl * rc;
            }
        }
    }

    let inv = 1.0 / count as f64;
    let mut r_mat = QMatrix::zeros(dim, dim);
    for r in 0..dim {
        r_mat[(r, r)] = Quaternion::from_real(acc[r * dim + r].real() * inv);
        for c in r + 1..dim {
            let v = acc[r * dim + c].scale(inv);
            r_mat[(r, c)] = v;
            r_mat[(c, r)] = v.conj();
        }
    }

    cross
        .into_iter()
        .map(|p| {
            Ok(WienerProblem {
                r: r_mat.clone(),
                p: QVector::new(p.into_iter().map(|q| q.scale(inv)).collect())?,
                sample_count: count,
            })
        })
        .collect()
}

/// Solves `(R + ridge I) y = p` and returns `w = conj(y)`.
pub fn solve_wiener(problem: &WienerProblem, ridge: f64) -> Result<QVector> {
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::Domain(format!("ridge must be finite and nonnegative, got {ridge}")));
    }
    if !problem.r.is_square() || problem.r.rows() != problem.p.len() {
        return Err(Error::Dimension(format!(
            "R is {}x{} but p has length {}",
            problem.r.rows(),
            problem.r.cols(),
            problem.p.len()
        )));
    }
    let y = if ridge > 0.0 {
        let loaded = problem.r.add(&QMatrix::identity(problem.r.rows()).scale(ridge))?;
        solve(&loaded, &problem.p)
    } else {
        solve(&problem.r, &problem.p)
    };
    let y = y.map_err(|e| match e {
        Error::Singular { column, pivot } => Error::SingularWiener { column, pivot },
        other => other,
    })?;
    Ok(y.conj())
}

/// [`solve_wiener`] with [`WienerProblem::default_ridge`].
pub fn solve_wiener_default(problem: &WienerProblem) -> Result<QVector> {
    solve_wiener(problem, problem.default_ridge())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseReport {
    /// Mean `|e|²`.
    pub linear: f64,
    /// Mean reference power used for normalization.
    pub reference_power: f64,
    /// `10 log10(linear / reference_power)`, floored at [`MSE_DB_FLOOR`].
    pub db: f64,
}

/// Normalized MSE in dB, floored.
pub fn to_db(linear: f64, reference_power: f64) -> f64 {
    let ratio = linear / reference_power;
    if ratio > 0.0 {
        (10.0 * ratio.log10()).max(MSE_DB_FLOOR)
    } else {
        MSE_DB_FLOOR
    }
}

pub fn evaluate_mse(w: &[Quaternion], signal: &[Quaternion], reference: &[Quaternion], len: usize, delay: usize) -> Result<MseReport> {
    evaluate_mse_stacked(w, &[signal], reference, len, delay)
}

pub fn evaluate_mse_stacked(
    w: &[Quaternion],
    streams: &[&[Quaternion]],
    reference: &[Quaternion],
    lags_per_stream: usize,
    delay: usize,
) -> Result<MseReport> {
    let n_total = check_block(streams, reference, lags_per_stream, delay)?;
    if w.len() != streams.len() * lags_per_stream {
        return Err(Error::Dimension(format!("{} weights for a {}-tap regressor", w.len(), streams.len() * lags_per_stream)));
    }
    let mut x = Regressor::stacked(streams, 0, lags_per_stream);
    let (mut err, mut pow) = (0.0, 0.0);
    for n in delay..n_total {
        x.fill(streams, n, lags_per_stream);
        let r = reference[n - delay];
        err += (r - dot_left_unchecked(w, x.as_slice())).norm_sq();
        pow += r.norm_sq();
    }
    let count = (n_total - delay) as f64;
    let linear = err / count;
    let reference_power = pow / count;
    Ok(MseReport { linear, reference_power, db: to_db(linear, reference_power) })
}

/// Sampled `E{x[n] conj(e[n])}` per regressor entry. Vanishes at the block
/// Wiener solution.
pub fn orthogonality_residual(
    w: &[Quaternion],
    streams: &[&[Quaternion]],
    reference: &[Quaternion],
    lags_per_stream: usize,
    delay: usize,
) -> Result<Vec<Quaternion>> {
    let n_total = check_block(streams, reference, lags_per_stream, delay)?;
    let dim = streams.len() * lags_per_stream;
    if w.len() != dim {
        return Err(Error::Dimension(format!("{} weights for a {dim}-tap regressor", w.len())));
    }
    let mut x = Regressor::stacked(streams, 0, lags_per_stream);
    let mut acc = vec![Quaternion::ZERO; dim];
    for n in delay..n_total {
        x.fill(streams, n, lags_per_stream);
        let e = reference[n - delay] - dot_left_unchecked(w, x.as_slice());
        let ec = e.conj();
        for (a, xl) in acc.iter_mut().zip(x.as_slice()) {
            *a += *xl * ec;
        }
    }
    let inv = 1.0 / (n_total - delay) as f64;
    Ok(acc.into_iter().map(|q| q.scale(inv)).collect())
}
