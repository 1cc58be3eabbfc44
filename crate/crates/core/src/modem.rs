//! 16-Q²AM: each quaternion component independently carries one bit as ±1.
//!
//! Bit `m` of the symbol index drives component `m` in storage order
//! `(q0, q1, q2, q3)`: a set bit maps to `+1`, a clear bit to `-1`.

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Energy of every constellation point.
pub const SYMBOL_ENERGY: f64 = 4.0;

/// A 16-Q²AM constellation point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    index: u8,
}

impl Symbol {
    /// # Panics
    /// If `index > 15`.
    pub fn from_index(index: u8) -> Self {
        assert!(index < 16, "16-Q²AM index out of range: {index}");
        Self { index }
    }

    pub fn index(self) -> u8 {
        self.index
    }

    pub fn bits(self) -> [bool; 4] {
        std::array::from_fn(|m| self.index >> m & 1 == 1)
    }

    pub fn value(self) -> Quaternion {
        let c = self.bits().map(|b| if b { 1.0 } else { -1.0 });
        Quaternion::from_array(c)
    }
}

impl From<Symbol> for Quaternion {
    fn from(s: Symbol) -> Self {
        s.value()
    }
}

/// Maps `(bit0, bit1, bit2, bit3)` onto `(q0, q1, q2, q3)`.
pub fn modulate(bits: [bool; 4]) -> Symbol {
    let index = bits.iter().enumerate().fold(0u8, |acc, (m, &b)| acc | (u8::from(b) << m));
    Symbol { index }
}

/// Hard decision: the nearest constellation point, which is the
/// componentwise sign. Zero decides `+1`.
pub fn demodulate(q: Quaternion) -> Symbol {
    modulate(q.to_array().map(|c| c >= 0.0))
}

/// All 16 symbols ordered by index.
pub fn constellation() -> [Symbol; 16] {
    std::array::from_fn(|i| Symbol::from_index(i as u8))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ErrorCounts {
    pub symbol_errors: usize,
    pub bit_errors: usize,
}

pub fn count_errors(sent: &[Symbol], decided: &[Symbol]) -> Result<ErrorCounts> {
    if sent.len() != decided.len() {
        return Err(Error::Dimension(format!(
            "sent {} symbols but decided {}",
            sent.len(),
            decided.len()
        )));
    }
    Ok(sent.iter().zip(decided).fold(ErrorCounts::default(), |mut acc, (s, d)| {
        let diff = (s.index ^ d.index).count_ones() as usize;
        acc.bit_errors += diff;
        acc.symbol_errors += usize::from(diff > 0);
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_symbols() {
        assert_eq!(modulate([true; 4]).value(), Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(modulate([false; 4]).value(), Quaternion::new(-1.0, -1.0, -1.0, -1.0));
        assert_eq!(modulate([true, false, false, true]).index(), 9);
    }

    #[test]
    fn exhaustive_mapping() {
        let points = constellation();
        for (i, s) in points.iter().enumerate() {
            assert_eq!(s.index() as usize, i);
            assert_eq!(s.value().norm_sq(), SYMBOL_ENERGY);
            assert_eq!(modulate(s.bits()), *s);
            assert_eq!(demodulate(s.value()), *s);
            for (j, t) in points.iter().enumerate() {
                if i != j {
                    assert!((s.value() - t.value()).norm_sq() >= 4.0);
                }
            }
        }
        let mean: Quaternion = points.iter().map(|s| s.value()).sum();
        assert_eq!(mean, Quaternion::ZERO);
    }

    #[test]
    fn sign_decisions() {
        let d = demodulate(Quaternion::new(0.9, 1.2, -0.3, 0.1));
        assert_eq!(d.value(), Quaternion::new(1.0, 1.0, -1.0, 1.0));
        assert_eq!(demodulate(Quaternion::ZERO).value(), Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(demodulate(d.value()), d);
    }

    #[test]
    fn error_counting() {
        let a: Vec<Symbol> = constellation().to_vec();
        assert_eq!(count_errors(&a, &a).unwrap(), ErrorCounts::default());
        let counts = count_errors(&[Symbol::from_index(0)], &[Symbol::from_index(15)]).unwrap();
        assert_eq!(counts, ErrorCounts { symbol_errors: 1, bit_errors: 4 });
        assert!(matches!(count_errors(&a, &a[..3]), Err(Error::Dimension(_))));
    }
}
