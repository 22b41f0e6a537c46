//! Small dense complex linear-algebra helpers shared by the rest of the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix used for couplings and secular matrices.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The `n x n` all-ones matrix.
pub fn ones(n: usize) -> CMatrix {
    CMatrix::from_element(n, n, ONE)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `max |(U U^*)_{ij} - delta_ij|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u * u.adjoint();
    max_abs_diff(&prod, &identity(u.nrows()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Determinant carried in logarithmic form so that huge or tiny values never
/// overflow: `det = exp(log_mag) * exp(i * phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_mag: f64,
    pub phase: f64,
    /// Log of the Hadamard bound (product of column norms); `log_mag - log_scale`
    /// measures how much cancellation the determinant suffered.
    pub log_scale: f64,
    /// Log of the smallest pivot after scaling every column to unit norm; a
    /// condition estimate that tells rounding noise from a genuine value.
    pub log_min_pivot: f64,
}

impl LogDet {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }
}

/// Returned when a pivot is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingularPivot;

/// LU factorisation with partial pivoting, returning the determinant in log form.
pub fn log_det(m: &CMatrix) -> Result<LogDet, SingularPivot> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "log_det needs a square matrix");
    let norms: Vec<f64> = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|x| *x == 0.0) {
        return Err(SingularPivot);
    }
    let log_scale = norms.iter().map(|x| x.ln()).sum::<f64>();
    let mut a = m.clone();
    for (j, norm) in norms.iter().enumerate() {
        a.column_mut(j).unscale_mut(*norm);
    }
    let mut log_mag = log_scale;
    let mut log_min_pivot = 0.0f64;
    let mut phase = 0.0;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return Err(SingularPivot);
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            phase += std::f64::consts::PI;
        }
        let pivot = a[(col, col)];
        log_mag += pivot_abs.ln();
        log_min_pivot = log_min_pivot.min(pivot_abs.ln());
        phase += pivot.arg();
        for r in (col + 1)..n {
            let factor = a[(r, col)] / pivot;
            if factor == ZERO {
                continue;
            }
            for c in (col + 1)..n {
                let delta = factor * a[(col, c)];
                a[(r, c)] -= delta;
            }
        }
    }
    Ok(LogDet {
        log_mag,
        phase: wrap_phase(phase),
        log_scale,
        log_min_pivot,
    })
}

/// Map an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Smallest singular value divided by the largest one.
pub fn inverse_condition(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Random unitary matrix: QR of a matrix with entries uniform in the unit square,
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}
