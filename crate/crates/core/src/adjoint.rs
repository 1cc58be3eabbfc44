//! Complex adjoint representation of quaternion matrices.
//!
//! Every quaternion `q` splits as `a + b j` with `a = q0 + q1 i` and
//! `b = q2 + q3 i`. An `n x m` quaternion matrix `A + B j` maps to the
//! `2n x 2m` complex block matrix
//!
//! ```text
//! [  A        B     ]
//! [ -conj(B)  conj(A) ]
//! ```
//!
//! The map is an injective ring homomorphism, so complex linear algebra on
//! the image answers quaternion questions. [`solve_via_adjoint`] uses it as
//! a second, independent route to the quaternion solve.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.q0, q.q1), Complex64::new(q.q2, q.q3))
}

fn join(a: Complex64, b: Complex64) -> Quaternion {
    Quaternion::new(a.re, a.im, b.re, b.im)
}

pub fn to_complex_adjoint(m: &QMatrix) -> ComplexMatrix {
    let (n, k) = (m.rows(), m.cols());
    let mut out = ComplexMatrix::zeros(2 * n, 2 * k);
    for r in 0..n {
        for c in 0..k {
            let (a, b) = split(m[(r, c)]);
            out[(r, c)] = a;
            out[(r, k + c)] = b;
            out[(n + r, c)] = -b.conj();
            out[(n + r, k + c)] = a.conj();
        }
    }
    out
}

/// Inverse of [`to_complex_adjoint`]. Fails unless the input has the
/// adjoint block structure to within `tol` (absolute, entrywise).
pub fn from_complex_adjoint(m: &ComplexMatrix, tol: f64) -> Result<QMatrix> {
    if !m.rows.is_multiple_of(2) || !m.cols.is_multiple_of(2) || m.rows == 0 || m.cols == 0 {
        return Err(Error::Dimension(format!("{}x{} is not an adjoint shape", m.rows, m.cols)));
    }
    let (n, k) = (m.rows / 2, m.cols / 2);
    let mut out = QMatrix::zeros(n, k);
    for r in 0..n {
        for c in 0..k {
            let a = m[(r, c)];
            let b = m[(r, k + c)];
            if (m[(n + r, c)] + b.conj()).norm() > tol || (m[(n + r, k + c)] - a.conj()).norm() > tol {
                return Err(Error::Domain(format!("entry ({r}, {c}) breaks the adjoint block structure")));
            }
            out[(r, c)] = join(a, b);
        }
    }
    Ok(out)
}

/// Complex Gaussian elimination with partial pivoting; solves `A X = B`
/// column by column.
pub fn solve_complex(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != a.cols || a.rows != b.rows {
        return Err(Error::Dimension(format!(
            "cannot solve {}x{} against {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap_or(col);
        let pivot = m[(pivot_row, col)];
        if !(pivot.norm() > 1e-12 * scale) {
            return Err(Error::Singular { column: col, pivot: pivot.norm_sqr() });
        }
        if pivot_row != col {
            for c in 0..n {
                m.data.swap(col * n + c, pivot_row * n + c);
            }
            for c in 0..x.cols {
                x.data.swap(col * x.cols + c, pivot_row * x.cols + c);
            }
        }
        for r in col + 1..n {
            let f = m[(r, col)] / pivot;
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
            for c in 0..x.cols {
                let v = x[(col, c)];
                x[(r, c)] -= f * v;
            }
        }
    }
    for c in 0..x.cols {
        for r in (0..n).rev() {
            let mut acc = x[(r, c)];
            for k in r + 1..n {
                acc -= m[(r, k)] * x[(k, c)];
            }
            x[(r, c)] = acc / m[(r, r)];
        }
    }
    Ok(x)
}

/// Solves the quaternion system `A x = b` entirely in the complex adjoint
/// representation.
pub fn solve_via_adjoint(a: &QMatrix, b: &[Quaternion]) -> Result<QVector> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::Dimension(format!("cannot solve {}x{} against {}", a.rows(), a.cols(), b.len())));
    }
    let n = b.len();
    let big = to_complex_adjoint(a);
    // first column of the adjoint of the n x 1 matrix b
    let mut rhs = ComplexMatrix::zeros(2 * n, 1);
    for (i, q) in b.iter().enumerate() {
        let (ba, bb) = split(*q);
        rhs[(i, 0)] = ba;
        rhs[(n + i, 0)] = -bb.conj();
    }
    let sol = solve_complex(&big, &rhs)?;
    let x = (0..n).map(|i| join(sol[(i, 0)], -sol[(n + i, 0)].conj())).collect();
    QVector::new(x)
}
