use num_complex::Complex64;
use rayon::prelude::*;

use super::{winding_number, Contour, Rect, SecularEvaluator, ZeroError, ZerosConfig};
use super::contour::rect_winding_jittered;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroStatus {
    /// Polished and confirmed by the winding of a box of diameter below the tolerance.
    Converged,
    /// Box centre of a box of diameter below the tolerance; Newton did not settle.
    Unpolished,
    /// Polished, but the smallest box whose winding could be resolved is larger
    /// than the tolerance (clusters and multiple zeros at the limit of double precision).
    Loose,
}

impl std::fmt::Display for ZeroStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZeroStatus::Converged => write!(f, "ok"),
            ZeroStatus::Unpolished => write!(f, "unpolished"),
            ZeroStatus::Loose => write!(f, "loose"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroRecord {
    pub k: Complex64,
    pub multiplicity: usize,
    /// `|F(k)|` relative to the magnitude of its summands.
    pub residual: f64,
    /// Half-diameter of the final enclosing box.
    pub radius: f64,
    pub status: ZeroStatus,
}

const SPLITS: [(f64, f64); 7] = [
    (0.5, 0.5),
    (0.46, 0.53),
    (0.54, 0.47),
    (0.42, 0.57),
    (0.58, 0.43),
    (0.37, 0.61),
    (0.63, 0.39),
];

const MAX_LEVELS: usize = 80;

/// Largest verification half-side, relative to `1 + |k|`, accepted for a polished zero.
const LOOSE_LIMIT: f64 = 1e-6;

enum Outcome {
    Found(ZeroRecord),
    Split(Vec<(Rect, usize)>),
}

fn relative_residual(eval: &SecularEvaluator, k: Complex64) -> f64 {
    let v = eval.value(k);
    v.relative_log().exp()
}

/// Newton iteration for a zero of multiplicity `m`; `None` if it leaves `bounds`
/// or does not settle.
fn newton(
    eval: &SecularEvaluator,
    start: Complex64,
    m: usize,
    bounds: &Rect,
    tol: f64,
    config: &ZerosConfig,
) -> Option<Complex64> {
    let mut k = start;
    let mut best = (f64::INFINITY, start);
    let mut last_step = f64::INFINITY;
    for _ in 0..config.newton_iterations {
        let v = eval.value(k);
        if v.log_mag == f64::NEG_INFINITY {
            return Some(k);
        }
        if v.relative_log() < best.0 {
            best = (v.relative_log(), k);
        }
        let d = eval.log_derivative(k)?;
        if d.norm() == 0.0 {
            break;
        }
        let step = m as f64 / d;
        k -= step;
        if !k.is_finite() || !bounds.contains(k) {
            return None;
        }
        last_step = step.norm();
        if last_step <= (1e-3 * tol).max(4.0 * f64::EPSILON * (1.0 + k.norm())) {
            return Some(k);
        }
    }
    // stalled in rounding noise: the best iterate is handed to the box check
    (last_step < (0.1 * tol).max(LOOSE_LIMIT * (1.0 + k.norm()))).then_some(best.1)
}

fn process(
    eval: &SecularEvaluator,
    rect: Rect,
    winding: usize,
    tol: f64,
    config: &ZerosConfig,
) -> Result<Outcome, ZeroError> {
    // Newton guess checked by a small box strictly inside `rect`; the box grows
    // while its boundary is lost in rounding noise.
    if let Some(k) = newton(eval, rect.center(), winding, &rect, tol, config) {
        let limit = (0.9 * rect.margin(k)).min((LOOSE_LIMIT * (1.0 + k.norm())).max(0.35 * tol));
        let mut half = 0.35 * tol;
        if half > limit && limit >= 0.05 * tol {
            half = limit;
        }
        while half <= limit {
            let tiny = Rect::around(k, half);
            match winding_number(eval, &Contour::Boundary(tiny), config) {
                Ok(w) if w.count == winding as i64 => {
                    let radius = tiny.diameter() / 2.0;
                    return Ok(Outcome::Found(ZeroRecord {
                        k,
                        multiplicity: winding,
                        residual: relative_residual(eval, k),
                        radius,
                        status: if 2.0 * radius <= tol {
                            ZeroStatus::Converged
                        } else {
                            ZeroStatus::Loose
                        },
                    }));
                }
                Err(ZeroError::OnZero { .. }) | Err(ZeroError::ContourUnresolved { .. }) => half *= 8.0,
                _ => break,
            }
        }
    }
    if rect.diameter() < tol {
        let k = rect.center();
        return Ok(Outcome::Found(ZeroRecord {
            k,
            multiplicity: winding,
            residual: relative_residual(eval, k),
            radius: rect.diameter() / 2.0,
            status: ZeroStatus::Unpolished,
        }));
    }
    let mut last_err = None;
    for (fx, fy) in SPLITS {
        let kids = rect.split(fx, fy);
        let counts: Result<Vec<i64>, ZeroError> = kids
            .iter()
            .map(|r| winding_number(eval, &Contour::Boundary(*r), config).map(|w| w.count))
            .collect();
        match counts {
            Ok(c) if c.iter().all(|&n| n >= 0) && c.iter().sum::<i64>() == winding as i64 => {
                return Ok(Outcome::Split(
                    kids.into_iter()
                        .zip(c)
                        .filter(|(_, n)| *n > 0)
                        .map(|(r, n)| (r, n as usize))
                        .collect(),
                ));
            }
            Ok(c) => {
                last_err = Some(ZeroError::ContourUnresolved {
                    reason: format!("child windings {c:?} do not add up to {winding}"),
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(match last_err {
        Some(ZeroError::OnZero { k }) => ZeroError::ContourUnresolved {
            reason: format!("every split of a box met a zero (near {k})"),
        },
        Some(e) => e,
        None => unreachable!(),
    })
}

/// All zeros in `rect` (sides may move by a fraction of a percent if they pass
/// through a zero), each to within a box of diameter `tol`, sorted by `Re k`
/// then `Im k`.
pub fn locate_zeros(
    eval: &SecularEvaluator,
    rect: &Rect,
    tol: f64,
    config: &ZerosConfig,
) -> Result<Vec<ZeroRecord>, ZeroError> {
    if !(tol > 0.0) {
        return Err(ZeroError::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let (region, w) = rect_winding_jittered(eval, rect, config)?;
    if w.count < 0 {
        return Err(ZeroError::ContourUnresolved {
            reason: format!("negative winding {}", w.count),
        });
    }
    let mut found = Vec::new();
    let mut work = if w.count > 0 {
        vec![(region, w.count as usize)]
    } else {
        Vec::new()
    };
    let mut level = 0;
    while !work.is_empty() {
        level += 1;
        if level > MAX_LEVELS {
            return Err(ZeroError::ContourUnresolved {
                reason: "subdivision did not terminate".into(),
            });
        }
        let outcomes: Result<Vec<Outcome>, ZeroError> = work
            .par_iter()
            .map(|&(r, n)| process(eval, r, n, tol, config))
            .collect();
        work = Vec::new();
        for o in outcomes? {
            match o {
                Outcome::Found(z) => found.push(z),
                Outcome::Split(kids) => work.extend(kids),
            }
        }
    }
    found.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(found)
}
