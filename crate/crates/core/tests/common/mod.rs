#![allow(dead_code)]

use quatlink::{QMatrix, Quaternion, SeededRng};

pub fn random_q(rng: &mut SeededRng) -> Quaternion {
    Quaternion::new(rng.standard_normal(), rng.standard_normal(), rng.standard_normal(), rng.standard_normal())
}

pub fn random_unit(rng: &mut SeededRng) -> Quaternion {
    let q = random_q(rng);
    q.scale(1.0 / q.norm())
}

pub fn random_vec(rng: &mut SeededRng, n: usize) -> Vec<Quaternion> {
    (0..n).map(|_| random_q(rng)).collect()
}

pub fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| random_q(rng))
}

/// Random matrix with a boosted diagonal, comfortably nonsingular.
pub fn well_conditioned(rng: &mut SeededRng, n: usize) -> QMatrix {
    let mut m = random_matrix(rng, n, n);
    for i in 0..n {
        m[(i, i)] += Quaternion::from_real(2.0 * n as f64);
    }
    m
}

pub fn vec_norm(v: &[Quaternion]) -> f64 {
    v.iter().map(|q| q.norm_sq()).sum::<f64>().sqrt()
}

pub fn vec_diff_norm(a: &[Quaternion], b: &[Quaternion]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm_sq()).sum::<f64>().sqrt()
}

pub fn rel_err(got: Quaternion, want: Quaternion) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}
