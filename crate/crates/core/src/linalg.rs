//! Dense quaternion vectors and matrices.
//!
//! All products use the left-multiplication convention: a matrix or weight
//! entry always sits on the left of the vector/signal entry it multiplies.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Relative pivot threshold on `norm_sq` below which [`solve`] reports a
/// singular matrix.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-24;

/// A non-empty quaternion column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QVector(Vec<Quaternion>);

impl QVector {
    pub fn new(elements: Vec<Quaternion>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Dimension("vector length must be at least 1".into()));
        }
        Ok(Self(elements))
    }

    /// # Panics
    /// If `len == 0`.
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "vector length must be at least 1");
        Self(vec![Quaternion::ZERO; len])
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Quaternion> {
        self.0
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|q| q.conj()).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|q| q.scale(s)).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| *a - *b).collect()))
    }

    /// Sum of `norm_sq` over all entries.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sq()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|q| q.is_finite())
    }
}

impl Deref for QVector {
    type Target = [Quaternion];
    fn deref(&self) -> &[Quaternion] {
        &self.0
    }
}

impl DerefMut for QVector {
    fn deref_mut(&mut self) -> &mut [Quaternion] {
        &mut self.0
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("lengths {a} and {b} differ")));
    }
    Ok(())
}

/// `Σ_l w[l] · s[l]`, weights on the left.
pub fn dot_left(w: &[Quaternion], s: &[Quaternion]) -> Result<Quaternion> {
    check_len(w.len(), s.len())?;
    Ok(dot_left_unchecked(w, s))
}

#[inline]
pub(crate) fn dot_left_unchecked(w: &[Quaternion], s: &[Quaternion]) -> Quaternion {
    w.iter().zip(s).fold(Quaternion::ZERO, |acc, (w, s)| acc + *w * *s)
}

/// Row-major dense quaternion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be at least 1x1");
        Self { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::Dimension("matrix dimensions must be at least 1x1".into()));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Quaternion] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn hermitian_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Quaternion {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|q| q.scale(s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// `(A x)[r] = Σ_c A[r][c] · x[c]`.
    pub fn matvec(&self, x: &[Quaternion]) -> Result<QVector> {
        check_len(self.cols, x.len())?;
        Ok(QVector((0..self.rows).map(|r| dot_left_unchecked(self.row(r), x)).collect()))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).map(|k| self[(r, k)] * other[(k, c)]).sum()
        }))
    }

    /// Largest entrywise deviation from `hermitian_transpose(self)`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Quaternion] {
        &mut self.data
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[r * self.cols + c]
    }
}

/// `M[r][c] = a[r] · conj(b[c])`.
pub fn outer_h(a: &[Quaternion], b: &[Quaternion]) -> QMatrix {
    QMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting on the
/// largest `norm_sq`. Row operations left-multiply by pivot inverses, which
/// keeps the left-multiplication convention intact under non-commutativity.
pub fn solve(a: &QMatrix, b: &[Quaternion]) -> Result<QVector> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("solve needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    check_len(n, b.len())?;

    let mut m = a.clone();
    let mut rhs = b.to_vec();

    let max_initial = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|idx| a[idx].norm_sq())
        .fold(0.0_f64, f64::max);
    if max_initial == 0.0 {
        return Err(Error::Singular { column: 0, pivot: 0.0 });
    }
    let threshold = SINGULAR_PIVOT_RATIO * max_initial;

    for col in 0..n {
        let (pivot_row, pivot_norm) = (col..n)
            .map(|r| (r, m[(r, col)].norm_sq()))
            .fold((col, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        if !(pivot_norm > threshold) {
            return Err(Error::Singular { column: col, pivot: pivot_norm });
        }
        if pivot_row != col {
            let cols = m.cols;
            let data = m.data_mut();
            for c in 0..cols {
                data.swap(col * cols + c, pivot_row * cols + c);
            }
            rhs.swap(col, pivot_row);
        }

        let inv = m[(col, col)].inverse()?;
        for r in col + 1..n {
            let factor = m[(r, col)] * inv;
            if factor.is_zero() {
                continue;
            }
            m[(r, col)] = Quaternion::ZERO;
            for c in col + 1..n {
                let v = m[(col, c)];
                m[(r, c)] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }

    let mut x = vec![Quaternion::ZERO; n];
    for r in (0..n).rev() {
        let tail: Quaternion = (r + 1..n).map(|c| m[(r, c)] * x[c]).sum();
        x[r] = m[(r, r)].inverse()? * (rhs[r] - tail);
    }
    Ok(QVector(x))
}
