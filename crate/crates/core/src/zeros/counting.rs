use num_complex::Complex64;
use rayon::prelude::*;

use super::{count_zeros, SecularEvaluator, ZeroError, ZerosConfig};

/// Smallest number of radii entering the slope fit.
const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct CountSample {
    /// Requested radius.
    pub radius: f64,
    /// Radius used after jitter.
    pub used_radius: f64,
    /// `None` when the contour could not be resolved.
    pub count: Option<usize>,
}

/// Samples of `N(R)` for disks centred at 0 and the fit `N ~ (2W/pi) R + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingTable {
    pub samples: Vec<CountSample>,
    pub slope: f64,
    pub intercept: f64,
    /// `(pi / 2) * slope`.
    pub w_est: f64,
    /// Two standard errors of `w_est` from the fit residuals (0 for a two-point fit).
    pub half_width: f64,
    /// Set when some radius could not be resolved; the fit uses the resolved ones.
    pub partial: bool,
}

/// Counts zeros in `|k| < R` for every radius (concurrently) and fits the slope
/// over the largest half of the radii (at least `MIN_FIT_POINTS` of them).
pub fn counting_function(
    eval: &SecularEvaluator,
    radii: &[f64],
    config: &ZerosConfig,
) -> Result<CountingTable, ZeroError> {
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(ZeroError::InvalidInput(
            "radii must be positive, increasing, and at least two".into(),
        ));
    }
    let samples: Vec<CountSample> = radii
        .par_iter()
        .map(|&r| match count_zeros(eval, Complex64::new(0.0, 0.0), r, config) {
            Ok(c) => CountSample {
                radius: r,
                used_radius: c.radius,
                count: Some(c.count),
            },
            Err(_) => CountSample {
                radius: r,
                used_radius: r,
                count: None,
            },
        })
        .collect();
    let partial = samples.iter().any(|s| s.count.is_none());
    let start = (samples.len() / 2).min(samples.len().saturating_sub(MIN_FIT_POINTS));
    let pts: Vec<(f64, f64)> = samples[start..]
        .iter()
        .filter_map(|s| s.count.map(|n| (s.used_radius, n as f64)))
        .collect();
    if pts.len() < 2 {
        return Err(ZeroError::ContourUnresolved {
            reason: "fewer than two resolved radii in the fitting range".into(),
        });
    }
    let (slope, intercept, se) = least_squares(&pts);
    Ok(CountingTable {
        samples,
        slope,
        intercept,
        w_est: std::f64::consts::FRAC_PI_2 * slope,
        half_width: 2.0 * std::f64::consts::FRAC_PI_2 * se,
        partial,
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, standard error of a)`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let se = if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (a, b, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        let (a, b, se) = least_squares(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        assert!((a - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && se < 1e-14);
    }
}
