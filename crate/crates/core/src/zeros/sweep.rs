use num_complex::Complex64;

use super::{locate_zeros, Rect, SecularEvaluator, ZeroError, ZerosConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedZero {
    pub track_id: usize,
    pub k: Complex64,
    pub multiplicity: usize,
    /// Distance moved since the previous step (0 for a new track).
    pub displacement: f64,
    /// Set when the link was ambiguous and a new track was started instead.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepStep {
    pub value: f64,
    pub zeros: Vec<TrackedZero>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTrajectory {
    pub parameter: String,
    pub steps: Vec<SweepStep>,
    pub track_count: usize,
}

impl SweepTrajectory {
    /// Positions of one track as `(parameter value, k)`.
    pub fn track(&self, id: usize) -> Vec<(f64, Complex64)> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.zeros
                    .iter()
                    .filter(move |z| z.track_id == id)
                    .map(move |z| (s.value, z.k))
            })
            .collect()
    }
}

const TRUST_FLOOR: f64 = 0.1;
const TRUST_FACTOR: f64 = 3.0;
/// Fraction of the distance to the nearest other zero a track may jump.
const SEPARATION_SHARE: f64 = 0.5;
const AMBIGUITY: f64 = 0.1;

/// Locates zeros of `family(value)` for every value of a monotone schedule and
/// links them into tracks by nearest-neighbour matching.
pub fn sweep_parameter<F>(
    parameter: &str,
    family: F,
    schedule: &[f64],
    region: &Rect,
    tol: f64,
    config: &ZerosConfig,
) -> Result<SweepTrajectory, ZeroError>
where
    F: Fn(f64) -> Result<SecularEvaluator, ZeroError>,
{
    let increasing = schedule.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = schedule.windows(2).all(|w| w[1] <= w[0]);
    if !(increasing || decreasing) {
        return Err(ZeroError::InvalidInput("schedule must be monotone".into()));
    }
    let mut steps: Vec<SweepStep> = Vec::with_capacity(schedule.len());
    let mut next_id = 0;
    // (track id, position, last displacement)
    let mut alive: Vec<(usize, Complex64, f64)> = Vec::new();
    for &value in schedule {
        let eval = family(value)?;
        let zeros = locate_zeros(&eval, region, tol, config)?;
        let window: Vec<f64> = alive
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let sep = alive
                    .iter()
                    .enumerate()
                    .filter(|(tj, _)| *tj != ti)
                    .map(|(_, u)| (u.1 - t.1).norm())
                    .fold(region.diameter(), f64::min);
                (TRUST_FACTOR * t.2).max(TRUST_FLOOR).max(SEPARATION_SHARE * sep)
            })
            .collect();
        // candidate links sorted by distance, matched greedily
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (zi, z) in zeros.iter().enumerate() {
            for (ti, t) in alive.iter().enumerate() {
                let d = (z.k - t.1).norm();
                if d <= window[ti] {
                    pairs.push((d, zi, ti));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut zero_link: Vec<Option<(usize, f64)>> = vec![None; zeros.len()];
        let mut ambiguous = vec![false; zeros.len()];
        let mut track_used = vec![false; alive.len()];
        for &(d, zi, ti) in &pairs {
            if zero_link[zi].is_some() || ambiguous[zi] || track_used[ti] {
                continue;
            }
            let rival = pairs
                .iter()
                .any(|&(d2, z2, t2)| z2 == zi && t2 != ti && !track_used[t2] && d2 <= d * (1.0 + AMBIGUITY) + 1e-15 && d > 1e-12);
            if rival {
                ambiguous[zi] = true;
                continue;
            }
            zero_link[zi] = Some((ti, d));
            track_used[ti] = true;
        }
        let mut tracked = Vec::with_capacity(zeros.len());
        let mut new_alive = Vec::with_capacity(zeros.len());
        for (zi, z) in zeros.iter().enumerate() {
            let (id, disp) = match zero_link[zi] {
                Some((ti, d)) => (alive[ti].0, d),
                None => {
                    next_id += 1;
                    (next_id - 1, 0.0)
                }
            };
            tracked.push(TrackedZero {
                track_id: id,
                k: z.k,
                multiplicity: z.multiplicity,
                displacement: disp,
                ambiguous: ambiguous[zi],
            });
            new_alive.push((id, z.k, disp));
        }
        alive = new_alive;
        steps.push(SweepStep {
            value,
            zeros: tracked,
        });
    }
    Ok(SweepTrajectory {
        parameter: parameter.to_string(),
        steps,
        track_count: next_id,
    })
}
