use num_complex::Complex64;

use super::weighted::WeightedSystem;
use super::ZeroError;
use crate::exppoly::{secular_exppoly_with, ExpPoly, SymbolicConfig};
use crate::graph::{MetricGraph, OneVertexModel};
use crate::linalg::log_det;
use crate::secular::{k_power, literal_matrix, stabilized_pattern, StabilizedPattern};

/// How the secular function is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Pivoted factorization of the literal matrix.
    Literal,
    /// Pivoted factorization of the column-reduced matrix.
    Stabilized,
    /// The symbolic exponential polynomial.
    ExpPoly,
    /// `ExpPoly` when the symbolic expansion succeeds, `Stabilized` otherwise.
    Auto,
}

/// `F(k) = exp(log_mag + i phase)`. `log_mag - log_scale` compares `F` with its
/// rounding-noise level: the sum of term magnitudes for an exponential
/// polynomial, the smallest column-scaled pivot for a determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecularValue {
    pub log_mag: f64,
    pub phase: f64,
    pub log_scale: f64,
}

impl SecularValue {
    /// `log(|F| / scale)`; `-inf` on an exact zero.
    pub fn relative_log(&self) -> f64 {
        self.log_mag - self.log_scale
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }
}

#[derive(Clone, Debug)]
enum Source {
    Literal(OneVertexModel),
    Stabilized {
        pattern: StabilizedPattern,
        lengths: Vec<f64>,
    },
    Symbolic(ExpPoly),
    Weighted(WeightedSystem),
}

/// Evaluates the secular function of one model; immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct SecularEvaluator {
    source: Source,
    phase_rate: f64,
    /// Power `m` of `k` divided out of `F`.
    k_power: usize,
}

/// Symbolic settings used by [`EvalMode::Auto`]: any size, bounded work.
pub fn auto_symbolic_config() -> SymbolicConfig {
    SymbolicConfig {
        cap: 63,
        max_states: 200_000,
        ..SymbolicConfig::default()
    }
}

impl SecularEvaluator {
    /// Evaluator of `F(k) / k^m`, where `k^m` is the largest power of `k`
    /// dividing `F` as an exponential polynomial. That factor comes from the
    /// normalization of the matrix and carries no resonance.
    pub fn new(model: &OneVertexModel, mode: EvalMode) -> Result<Self, ZeroError> {
        let mut out = Self::new_raw(model, mode)?;
        match &mut out.source {
            Source::Symbolic(poly) => {
                let (m, rest) = poly.factor_out_k();
                *poly = rest;
                out.k_power = m;
            }
            _ => out.k_power = k_power(model),
        }
        Ok(out)
    }

    /// Evaluator of the determinant itself, zero at `k = 0` included.
    pub fn new_raw(model: &OneVertexModel, mode: EvalMode) -> Result<Self, ZeroError> {
        let span = 2.0 * model.length_values().iter().sum::<f64>();
        let direct_rate = span + 1.0;
        match mode {
            EvalMode::Literal => Ok(Self {
                source: Source::Literal(model.clone()),
                phase_rate: direct_rate,
                k_power: 0,
            }),
            EvalMode::Stabilized => Ok(Self {
                source: Source::Stabilized {
                    pattern: stabilized_pattern(model),
                    lengths: model.length_values(),
                },
                phase_rate: direct_rate,
                k_power: 0,
            }),
            EvalMode::ExpPoly => {
                let e = secular_exppoly_with(model, &auto_symbolic_config())?;
                Ok(Self::symbolic(e.poly))
            }
            EvalMode::Auto => match secular_exppoly_with(model, &auto_symbolic_config()) {
                Ok(e) => Ok(Self::symbolic(e.poly)),
                Err(_) => Self::new_raw(model, EvalMode::Stabilized),
            },
        }
    }

    /// Evaluator of an exponential polynomial with its `k^m` factor removed.
    pub fn from_exppoly(poly: ExpPoly) -> Self {
        let (m, rest) = poly.factor_out_k();
        let mut out = Self::symbolic(rest);
        out.k_power = m;
        out
    }

    fn symbolic(poly: ExpPoly) -> Self {
        let span = match (poly.sigma_min(), poly.sigma_max()) {
            (Some(lo), Some(hi)) => {
                use num_traits::ToPrimitive;
                (hi - lo).to_f64().unwrap_or(0.0)
            }
            _ => 0.0,
        };
        Self {
            source: Source::Symbolic(poly),
            phase_rate: span + 1.0,
            k_power: 0,
        }
    }

    /// Evaluator of a weighted graph in its original variables (no rescaling),
    /// with the `k^m` factor removed.
    pub fn weighted_direct(graph: &MetricGraph) -> Result<Self, ZeroError> {
        let system = WeightedSystem::new(graph)?;
        let rate = 2.0 * graph.weighted_size() + 1.0;
        let m = system.k_power();
        Ok(Self {
            source: Source::Weighted(system),
            phase_rate: rate,
            k_power: m,
        })
    }

    /// Power of `k` divided out of the determinant.
    pub fn k_power(&self) -> usize {
        self.k_power
    }

    pub fn mode(&self) -> EvalMode {
        match self.source {
            Source::Literal(_) => EvalMode::Literal,
            Source::Stabilized { .. } | Source::Weighted(_) => EvalMode::Stabilized,
            Source::Symbolic(_) => EvalMode::ExpPoly,
        }
    }

    pub fn description(&self) -> &'static str {
        match self.source {
            Source::Literal(_) => "direct determinant (literal matrix)",
            Source::Stabilized { .. } => "direct determinant (column-reduced matrix)",
            Source::Symbolic(_) => "exponential polynomial",
            Source::Weighted(_) => "direct determinant (weighted variables)",
        }
    }

    /// Upper estimate of `|d arg F / dk|` away from zeros.
    pub fn phase_rate(&self) -> f64 {
        self.phase_rate
    }

    pub fn value(&self, k: Complex64) -> SecularValue {
        let from_det = |m| match log_det(&m) {
            Ok(ld) => SecularValue {
                log_mag: ld.log_mag,
                phase: ld.phase,
                log_scale: ld.log_mag - ld.log_min_pivot,
            },
            Err(_) => SecularValue {
                log_mag: f64::NEG_INFINITY,
                phase: 0.0,
                log_scale: 0.0,
            },
        };
        let strip = |v: SecularValue| {
            if self.k_power == 0 || !v.log_mag.is_finite() {
                return v;
            }
            if k == Complex64::new(0.0, 0.0) {
                return SecularValue {
                    log_mag: f64::NEG_INFINITY,
                    ..v
                };
            }
            let m = self.k_power as f64;
            let lk = k.norm().ln();
            SecularValue {
                log_mag: v.log_mag - m * lk,
                phase: crate::linalg::wrap_phase(v.phase - m * k.arg()),
                log_scale: v.log_scale - m * lk,
            }
        };
        match &self.source {
            Source::Literal(model) => strip(from_det(literal_matrix(model, k))),
            Source::Stabilized { pattern, lengths } => strip(from_det(pattern.evaluate(k, lengths))),
            Source::Weighted(system) => strip(from_det(system.matrix(k))),
            Source::Symbolic(poly) => {
                let lv = poly.evaluate_log(k);
                SecularValue {
                    log_mag: lv.log_mag,
                    phase: lv.phase,
                    log_scale: lv.log_scale,
                }
            }
        }
    }

    /// `F'(k) / F(k)` by a central difference with step `1e-6 (1 + |k|)`.
    pub fn log_derivative(&self, k: Complex64) -> Option<Complex64> {
        let h = 1e-6 * (1.0 + k.norm());
        let v0 = self.value(k);
        if !v0.log_mag.is_finite() {
            return None;
        }
        let ratio = |v: SecularValue| {
            Complex64::from_polar((v.log_mag - v0.log_mag).exp(), v.phase - v0.phase)
        };
        let vp = self.value(k + h);
        let vm = self.value(k - h);
        let d = (ratio(vp) - ratio(vm)) / (2.0 * h);
        d.is_finite().then_some(d)
    }
}

/// `(log|F(k)|, arg F(k))` through a pivoted factorization of the resonance matrix.
pub fn secular_value(model: &OneVertexModel, k: Complex64) -> Result<(f64, f64), ZeroError> {
    let v = SecularEvaluator::new_raw(model, EvalMode::Stabilized)?.value(k);
    if v.log_mag.is_finite() {
        Ok((v.log_mag, v.phase))
    } else {
        Err(ZeroError::OnZero { k })
    }
}
