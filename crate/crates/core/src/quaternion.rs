//! Hamilton quaternions over `f64`.
//!
//! A quaternion is `q0 + i q1 + j q2 + k q3` with `i² = j² = k² = ijk = -1`.
//! Multiplication is associative but not commutative, so every product in
//! this crate is written with an explicit factor order.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    /// Real part.
    pub q0: f64,
    /// `i` component.
    pub q1: f64,
    /// `j` component.
    pub q2: f64,
    /// `k` component.
    pub q3: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self { q0, q1, q2, q3 }
    }

    pub const fn from_real(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    /// Components in storage order `(q0, q1, q2, q3)`.
    pub const fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub const fn real(self) -> f64 {
        self.q0
    }

    pub fn conj(self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    /// `q0² + q1² + q2² + q3²`, the real part of `q · conj(q)`.
    pub fn norm_sq(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    /// Two-sided inverse `conj(q) / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sq();
        if n == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.q0.is_finite() && self.q1.is_finite() && self.q2.is_finite() && self.q3.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.q0 == 0.0 && self.q1 == 0.0 && self.q2 == 0.0 && self.q3 == 0.0
    }
}

impl From<f64> for Quaternion {
    fn from(re: f64) -> Self {
        Self::from_real(re)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.q0, self.q1, self.q2, self.q3)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.q0 + rhs.q0, self.q1 + rhs.q1, self.q2 + rhs.q2, self.q3 + rhs.q3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.q0 - rhs.q0, self.q1 - rhs.q1, self.q2 - rhs.q2, self.q3 - rhs.q3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

/// Hamilton product `self · rhs`.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
            a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
            a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
            a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Quaternion> for Quaternion {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, q| acc + *q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const ONE: Quaternion = Quaternion::ONE;

    #[test]
    fn hamilton_table() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(J * I, -K);
        assert_eq!(K * J, -I);
        assert_eq!(I * K, -J);
        for u in [I, J, K] {
            assert_eq!(u * u, -ONE);
        }
        assert_eq!(I * J * K, -ONE);
    }

    #[test]
    fn expanded_product() {
        // (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        let got = (ONE + I) * (ONE + J);
        assert_eq!(got, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conjugation() {
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(q.conj(), Quaternion::new(1.0, -1.0, -1.0, -1.0));
        assert_eq!(Quaternion::from_real(5.0).conj(), Quaternion::from_real(5.0));
        assert_eq!(q.conj().conj(), q);
    }

    #[test]
    fn norms() {
        assert_eq!(Quaternion::new(1.0, 1.0, 1.0, 1.0).norm_sq(), 4.0);
        assert_eq!(Quaternion::ZERO.norm_sq(), 0.0);
        let q = Quaternion::new(1.0, -2.0, 3.0, 0.5);
        assert_eq!((q * q.conj()).real(), q.norm_sq());
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::from_real(2.0).inverse().unwrap(), Quaternion::from_real(0.5));
        assert_eq!(I.inverse().unwrap(), -I);
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        let inv = q.inverse().unwrap();
        assert_eq!(inv, Quaternion::new(0.25, -0.25, -0.25, -0.25));
        assert_eq!(q * inv, ONE);
        assert_eq!(inv * q, ONE);
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn not_commutative() {
        assert_ne!(I * J, J * I);
    }
}
