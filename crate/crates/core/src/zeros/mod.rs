//! Argument-principle counting and localization of secular-function zeros.

mod contour;
mod counting;
mod evaluator;
mod locate;
mod sweep;
mod weighted;

pub use contour::{rect_winding_jittered, winding_number, Contour, Rect, Winding};
pub use counting::{counting_function, CountSample, CountingTable};
pub use evaluator::{auto_symbolic_config, secular_value, EvalMode, SecularEvaluator, SecularValue};
pub use locate::{locate_zeros, ZeroRecord, ZeroStatus};
pub use sweep::{sweep_parameter, SweepStep, SweepTrajectory, TrackedZero};

use num_complex::Complex64;
use thiserror::Error;

use crate::exppoly::ExpPolyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroError {
    #[error("contour unresolved: {reason}")]
    ContourUnresolved { reason: String },
    #[error("contour passes through a zero near k = {k}")]
    OnZero { k: Complex64 },
    #[error(transparent)]
    Symbolic(#[from] ExpPolyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Tolerances of the contour machinery.
#[derive(Clone, Debug, PartialEq)]
pub struct ZerosConfig {
    /// `|F| < guard * scale` on the contour counts as hitting a zero.
    pub near_zero_guard: f64,
    /// Accepted distance of a winding from the nearest integer.
    pub integrality_tolerance: f64,
    /// Bisection depth of one phase-tracking step.
    pub max_depth: usize,
    /// Minimum number of samples around a whole contour.
    pub min_samples: usize,
    /// Largest change of `log|F|` accepted in one step.
    pub max_log_step: f64,
    /// Relative radius / side moves tried when a contour hits a zero.
    pub jitter: Vec<f64>,
    /// Newton iterations used to accelerate localization.
    pub newton_iterations: usize,
}

impl Default for ZerosConfig {
    fn default() -> Self {
        Self {
            near_zero_guard: 1e-13,
            integrality_tolerance: 0.05,
            max_depth: 40,
            min_samples: 32,
            max_log_step: 1.0,
            jitter: vec![1e-3, -1e-3, 2.5e-3, -2.5e-3, 5e-3, -5e-3],
            newton_iterations: 60,
        }
    }
}

/// Result of [`count_zeros`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskCount {
    pub count: usize,
    /// Radius actually used after jitter.
    pub radius: f64,
    pub integrality: f64,
}

/// Number of zeros (with multiplicity) in the disk `|k - center| < radius`.
pub fn count_zeros(
    eval: &SecularEvaluator,
    center: Complex64,
    radius: f64,
    config: &ZerosConfig,
) -> Result<DiskCount, ZeroError> {
    if !(radius > 0.0) {
        return Err(ZeroError::InvalidInput(format!("radius {radius} must be positive")));
    }
    let mut last = None;
    for &j in std::iter::once(&0.0).chain(config.jitter.iter()) {
        let r = radius * (1.0 + j);
        match winding_number(eval, &Contour::Circle { center, radius: r }, config) {
            Ok(w) if w.count >= 0 => {
                return Ok(DiskCount {
                    count: w.count as usize,
                    radius: r,
                    integrality: w.integrality,
                })
            }
            Ok(w) => {
                return Err(ZeroError::ContourUnresolved {
                    reason: format!("negative winding {} (the function has poles?)", w.count),
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(match last {
        Some(ZeroError::OnZero { k }) => ZeroError::ContourUnresolved {
            reason: format!("every jittered contour met a zero (last near {k})"),
        },
        Some(e) => e,
        None => unreachable!(),
    })
}
