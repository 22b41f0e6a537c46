use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

/// Polynomial in `k` with complex coefficients; index = power of `k`.
/// Trailing zero coefficients are always stripped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyInK {
    coeffs: Vec<Complex64>,
}

impl PolyInK {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b k`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, k: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * k + c)
    }

    pub fn add(&self, other: &PolyInK) -> PolyInK {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Complex64], i: usize| v.get(i).copied().unwrap_or_default();
        PolyInK::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn mul(&self, other: &PolyInK) -> PolyInK {
        if self.is_zero() || other.is_zero() {
            return PolyInK::zero();
        }
        let mut out = vec![Complex64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyInK::new(out)
    }

    pub fn scale(&self, s: Complex64) -> PolyInK {
        PolyInK::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Index of the first nonzero coefficient (0 for the zero polynomial).
    pub fn lowest_power(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Divide by `k^m`; the low coefficients must already be zero.
    pub fn shift_down(&self, m: usize) -> PolyInK {
        PolyInK::new(self.coeffs.iter().skip(m).copied().collect())
    }

    /// Zero every coefficient below `threshold`; returns the trimmed polynomial
    /// and the largest removed norm.
    pub(crate) fn chop(&self, threshold: f64) -> (PolyInK, f64) {
        let mut dropped: f64 = 0.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.norm() < threshold {
                    dropped = dropped.max(c.norm());
                    Complex64::zero()
                } else {
                    *c
                }
            })
            .collect();
        (PolyInK::new(coeffs), dropped)
    }
}

impl fmt::Display for PolyInK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match p {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})k")?,
                _ => write!(f, "({c})k^{p}")?,
            }
        }
        Ok(())
    }
}
