use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;

use super::{SecularEvaluator, SecularValue, ZeroError, ZerosConfig};
use crate::linalg::wrap_phase;

/// Axis-aligned box in the `k` plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.re_min && k.re <= self.re_max && k.im >= self.im_min && k.im <= self.im_max
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn margin(&self, k: Complex64) -> f64 {
        (k.re - self.re_min)
            .min(self.re_max - k.re)
            .min(k.im - self.im_min)
            .min(self.im_max - k.im)
    }

    /// Grow every side by `fraction` of the box size (shrink for negative values).
    pub fn inflate(&self, fraction: f64) -> Rect {
        let dx = fraction * self.width();
        let dy = fraction * self.height();
        Rect::new(
            self.re_min - dx,
            self.re_max + dx,
            self.im_min - dy,
            self.im_max + dy,
        )
    }

    /// Square of half-side `half` centred at `k`.
    pub fn around(k: Complex64, half: f64) -> Rect {
        Rect::new(k.re - half, k.re + half, k.im - half, k.im + half)
    }

    /// The four children obtained by cutting at relative positions `fx`, `fy`.
    pub fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_min + fx * self.width();
        let ym = self.im_min + fy * self.height();
        [
            Rect::new(self.re_min, xm, self.im_min, ym),
            Rect::new(xm, self.re_max, self.im_min, ym),
            Rect::new(self.re_min, xm, ym, self.im_max),
            Rect::new(xm, self.re_max, ym, self.im_max),
        ]
    }
}

/// A closed, positively oriented contour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    Boundary(Rect),
}

impl Contour {
    pub fn length(&self) -> f64 {
        match self {
            Contour::Circle { radius, .. } => TAU * radius,
            Contour::Boundary(r) => 2.0 * (r.width() + r.height()),
        }
    }

    /// Point at parameter `t` in `[0, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Contour::Circle { center, radius } => center + Complex64::from_polar(radius, TAU * t),
            Contour::Boundary(r) => {
                let (w, h) = (r.width(), r.height());
                let mut s = t.rem_euclid(1.0) * 2.0 * (w + h);
                if s <= w {
                    return Complex64::new(r.re_min + s, r.im_min);
                }
                s -= w;
                if s <= h {
                    return Complex64::new(r.re_max, r.im_min + s);
                }
                s -= h;
                if s <= w {
                    return Complex64::new(r.re_max - s, r.im_max);
                }
                s -= w;
                Complex64::new(r.re_min, r.im_max - s)
            }
        }
    }

    /// Parameters of the corners, which must be sampled exactly.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Contour::Circle { .. } => vec![0.0, 1.0],
            Contour::Boundary(r) => {
                let p = 2.0 * (r.width() + r.height());
                let (w, h) = (r.width() / p, r.height() / p);
                vec![0.0, w, w + h, 2.0 * w + h, 1.0]
            }
        }
    }
}

/// Outcome of one resolved contour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub count: i64,
    /// `|total / 2 pi - count|` before rounding.
    pub integrality: f64,
    pub evaluations: usize,
}

/// Winding number of `F` along `contour` by adaptive phase tracking.
pub fn winding_number(
    eval: &SecularEvaluator,
    contour: &Contour,
    config: &ZerosConfig,
) -> Result<Winding, ZeroError> {
    let log_guard = config.near_zero_guard.ln();
    let mut evaluations = 0usize;
    let mut sample = |t: f64| -> Result<SecularValue, ZeroError> {
        let k = contour.point(t);
        let v = eval.value(k);
        evaluations += 1;
        if !(v.relative_log() >= log_guard) || !v.phase.is_finite() {
            return Err(ZeroError::OnZero { k });
        }
        Ok(v)
    };

    let breaks = contour.breakpoints();
    let length = contour.length();
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let seg_len = (t1 - t0) * length;
        let pieces = ((seg_len * eval.phase_rate() / FRAC_PI_4).ceil() as usize)
            .max((config.min_samples as f64 * (t1 - t0)).ceil() as usize)
            .max(4);
        let mut prev_t = t0;
        let mut prev = sample(t0)?;
        for i in 1..=pieces {
            let t = if i == pieces {
                t1
            } else {
                t0 + (t1 - t0) * i as f64 / pieces as f64
            };
            let next = sample(t)?;
            total += track_segment(&mut sample, prev_t, prev, t, next, config)?;
            prev_t = t;
            prev = next;
        }
    }
    let w = total / TAU;
    let count = w.round();
    let integrality = (w - count).abs();
    if integrality >= config.integrality_tolerance {
        return Err(ZeroError::ContourUnresolved {
            reason: format!("winding {w:.4} is not close to an integer"),
        });
    }
    Ok(Winding {
        count: count as i64,
        integrality,
        evaluations,
    })
}

/// Phase increment from `t0` to `t1`, bisecting until every sub-step is small.
fn track_segment<S>(
    sample: &mut S,
    t0: f64,
    v0: SecularValue,
    t1: f64,
    v1: SecularValue,
    config: &ZerosConfig,
) -> Result<f64, ZeroError>
where
    S: FnMut(f64) -> Result<SecularValue, ZeroError>,
{
    let mut total = 0.0;
    let mut stack = vec![(t0, v0, t1, v1, 0usize)];
    while let Some((a, va, b, vb, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let vm = sample(m)?;
        let d1 = wrap_phase(vm.phase - va.phase);
        let d2 = wrap_phase(vb.phase - vm.phase);
        let smooth = d1.abs() < FRAC_PI_2
            && d2.abs() < FRAC_PI_2
            && (vm.log_mag - va.log_mag).abs() < config.max_log_step
            && (vb.log_mag - vm.log_mag).abs() < config.max_log_step
            && (wrap_phase(vb.phase - va.phase) - (d1 + d2)).abs() < PI / 8.0;
        if smooth {
            total += d1 + d2;
            continue;
        }
        if depth >= config.max_depth {
            return Err(ZeroError::ContourUnresolved {
                reason: format!("phase refinement exceeded depth {}", config.max_depth),
            });
        }
        stack.push((a, va, m, vm, depth + 1));
        stack.push((m, vm, b, vb, depth + 1));
    }
    Ok(total)
}

/// Winding number of a rectangle boundary, retrying with slightly moved
/// sides when the boundary runs into a zero.
pub fn rect_winding_jittered(
    eval: &SecularEvaluator,
    rect: &Rect,
    config: &ZerosConfig,
) -> Result<(Rect, Winding), ZeroError> {
    let mut last = None;
    for &j in std::iter::once(&0.0).chain(config.jitter.iter()) {
        let r = rect.inflate(j);
        match winding_number(eval, &Contour::Boundary(r), config) {
            Ok(w) => return Ok((r, w)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(ZeroError::ContourUnresolved {
        reason: "no jitter attempted".into(),
    }))
}
