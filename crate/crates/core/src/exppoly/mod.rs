//! Exponential polynomials `F(k) = sum_sigma c_sigma(k) e^{i k sigma}` with exact
//! rational exponents and polynomial coefficients.

mod poly;
mod secular;

pub use poly::PolyInK;
pub use secular::{
    secular_exppoly, secular_exppoly_with, sigma_lattice, SecularExpansion, SymbolicConfig,
    DEFAULT_SYMBOLIC_CAP,
};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpPolyError {
    #[error("exponential polynomials built on different length bases")]
    BasisMismatch,
    #[error("model of size {size} exceeds the symbolic cap {cap}; use the numeric route")]
    TooLargeForSymbolic { size: usize, cap: usize },
    #[error("symbolic expansion exceeded the state budget ({states} partial minors)")]
    StateBudget { states: usize },
    #[error("secular function vanishes identically")]
    DegenerateSecularFunction,
    #[error("edge lengths are not exact rationals; the symbolic route needs rational lengths")]
    IrrationalLengths,
}

/// Lengths a polynomial's exponents are built from. An empty basis is
/// compatible with every other basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LengthBasis(pub Vec<Rational64>);

impl LengthBasis {
    fn merge(&self, other: &LengthBasis) -> Result<LengthBasis, ExpPolyError> {
        if self.0.is_empty() {
            Ok(other.clone())
        } else if other.0.is_empty() || self == other {
            Ok(self.clone())
        } else {
            Err(ExpPolyError::BasisMismatch)
        }
    }
}

/// A value `exp(log_mag + i phase)`; `log_scale` is the log of the sum of term
/// magnitudes, so `log_mag - log_scale` measures cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub log_mag: f64,
    pub phase: f64,
    pub log_scale: f64,
}

/// What [`ExpPoly::cleanup`] removed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CleanupReport {
    pub threshold: f64,
    pub dropped_terms: usize,
    /// Largest coefficient norm among removed pieces.
    pub largest_dropped: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    terms: BTreeMap<Rational64, PolyInK>,
    basis: LengthBasis,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: PolyInK) -> Self {
        Self::monomial(Rational64::zero(), c)
    }

    /// `c(k) e^{i k sigma}`.
    pub fn monomial(sigma: Rational64, c: PolyInK) -> Self {
        Self::from_terms([(sigma, c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational64, PolyInK)>) -> Self {
        let mut out = Self::zero();
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn with_basis(mut self, basis: LengthBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn basis(&self) -> &LengthBasis {
        &self.basis
    }

    fn add_term(&mut self, sigma: Rational64, c: PolyInK) {
        let entry = self.terms.entry(sigma).or_insert_with(PolyInK::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&sigma);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational64, &PolyInK)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, sigma: Rational64) -> Option<&PolyInK> {
        self.terms.get(&sigma)
    }

    pub fn exponents(&self) -> Vec<Rational64> {
        self.terms.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sigma_min(&self) -> Option<Rational64> {
        self.terms.keys().next().copied()
    }

    pub fn sigma_max(&self) -> Option<Rational64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &ExpPoly) -> Result<ExpPoly, ExpPolyError> {
        let basis = self.basis.merge(&other.basis)?;
        let mut out = self.clone();
        out.basis = basis;
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &ExpPoly) -> Result<ExpPoly, ExpPolyError> {
        let basis = self.basis.merge(&other.basis)?;
        let mut out = ExpPoly::zero().with_basis(basis);
        for (s1, c1) in &self.terms {
            for (s2, c2) in &other.terms {
                out.add_term(s1 + s2, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, p: &PolyInK) -> ExpPoly {
        let mut out = ExpPoly::zero().with_basis(self.basis.clone());
        for (s, c) in &self.terms {
            out.add_term(*s, c.mul(p));
        }
        out
    }

    /// Terms `c_sigma(k) e^{i k sigma}` at `k`, largest magnitude first.
    fn term_values(&self, k: Complex64) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mut v: Vec<Complex64> = self
            .terms
            .iter()
            .map(|(s, c)| c.eval(k) * (i * k * s.to_f64().unwrap_or(f64::NAN)).exp())
            .collect();
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v
    }

    pub fn evaluate(&self, k: Complex64) -> Complex64 {
        self.term_values(k).into_iter().sum()
    }

    /// Overflow-free evaluation: the terms are summed relative to the largest one.
    /// The scale is `sum |c_j| |k|^j |e^{i k sigma}|` over all monomials, so
    /// cancellation inside one coefficient counts as cancellation too.
    pub fn evaluate_log(&self, k: Complex64) -> LogValue {
        let r = k.norm();
        // (log of the monomial magnitude sum, coefficient value relative to it, phase shift)
        let parts: Vec<(f64, Complex64, f64)> = self
            .terms
            .iter()
            .filter_map(|(s, c)| {
                let mag: f64 = c
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, a| acc * r + a.norm());
                if !(mag > 0.0) {
                    return None;
                }
                let s = s.to_f64().unwrap_or(f64::NAN);
                Some((mag.ln() - s * k.im, c.eval(k) / mag, s * k.re))
            })
            .collect();
        if parts.is_empty() {
            return LogValue {
                log_mag: f64::NEG_INFINITY,
                phase: 0.0,
                log_scale: f64::NEG_INFINITY,
            };
        }
        let top = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let mut rel: Vec<(f64, Complex64)> = parts
            .iter()
            .map(|&(lm, v, ph)| {
                let w = (lm - top).exp();
                (w, v * Complex64::from_polar(w, ph))
            })
            .collect();
        rel.sort_by(|a, b| b.0.total_cmp(&a.0));
        let scale: f64 = rel.iter().map(|z| z.0).sum();
        let sum: Complex64 = rel.iter().map(|z| z.1).sum();
        LogValue {
            log_mag: top + sum.norm().ln(),
            phase: sum.arg(),
            log_scale: top + scale.ln(),
        }
    }

    /// `(sigma_max - sigma_min) / 2`.
    pub fn effective_size(&self) -> Result<Rational64, ExpPolyError> {
        match (self.sigma_min(), self.sigma_max()) {
            (Some(lo), Some(hi)) => Ok((hi - lo) / 2),
            _ => Err(ExpPolyError::DegenerateSecularFunction),
        }
    }

    /// Largest power `m` of `k` dividing every coefficient, and the quotient.
    pub fn factor_out_k(&self) -> (usize, ExpPoly) {
        let m = self
            .terms
            .values()
            .map(|c| c.lowest_power())
            .min()
            .unwrap_or(0);
        let mut out = ExpPoly::zero().with_basis(self.basis.clone());
        for (s, c) in &self.terms {
            out.add_term(*s, c.shift_down(m));
        }
        (m, out)
    }

    pub fn max_coefficient_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.max_norm())
            .fold(0.0, f64::max)
    }

    /// Drop terms (and single coefficients) whose norm is below
    /// `relative * max_coefficient_norm()`.
    pub fn cleanup(&mut self, relative: f64) -> CleanupReport {
        let threshold = relative * self.max_coefficient_norm();
        let mut report = CleanupReport {
            threshold,
            ..CleanupReport::default()
        };
        let mut kept = BTreeMap::new();
        for (s, c) in std::mem::take(&mut self.terms) {
            if c.max_norm() < threshold {
                report.dropped_terms += 1;
                report.largest_dropped = report.largest_dropped.max(c.max_norm());
                continue;
            }
            let (trimmed, dropped) = c.chop(threshold);
            report.largest_dropped = report.largest_dropped.max(dropped);
            kept.insert(s, trimmed);
        }
        self.terms = kept;
        report
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (s, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) e^(ik*{s})")?;
        }
        Ok(())
    }
}
