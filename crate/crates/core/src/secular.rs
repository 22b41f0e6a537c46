//! The resonance-condition matrix `(U - I) C_1(k) + i k (U + I) C_2(k)` of a
//! one-vertex model, in its literal form and in an equivalent column-reduced
//! form whose entries carry a single exponential each.
//!
//! Both forms use the internal-first ordering of [`OneVertexModel::canonical_u`]
//! and have exactly the same determinant.

use num_complex::Complex64;

use crate::graph::OneVertexModel;
use crate::linalg::{identity, CMatrix, I, ZERO};

/// One summand `(c0 + c1 k) e^{i k s l_edge}` of a stabilized entry, where
/// `shift = Some((edge, s))` with `s = +-1`, or `None` for no exponential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntryTerm {
    pub shift: Option<(usize, i8)>,
    pub c0: Complex64,
    pub c1: Complex64,
}

impl EntryTerm {
    pub fn eval(&self, k: Complex64, lengths: &[f64]) -> Complex64 {
        let base = self.c0 + self.c1 * k;
        match self.shift {
            None => base,
            Some((e, s)) => base * (I * k * (s as f64) * lengths[e]).exp(),
        }
    }
}

/// Sparse description of the stabilized matrix: `entries[row][col]` lists the
/// summands of that entry (empty = structural zero).
#[derive(Clone, Debug)]
pub struct StabilizedPattern {
    pub dim: usize,
    pub entries: Vec<Vec<Vec<EntryTerm>>>,
}

/// Builds the stabilized column form. With `P = U - I`, `Q = U + I`,
/// `X = P + kQ`, `Y = P - kQ`, edge `j` (ends `a = 2j`, `b = 2j + 1`) gets the
/// columns `i (X_a + e^{-ikl} Y_b)` and `(Y_a + e^{ikl} X_b) / 2`, and each lead
/// column is `Y`. The column operations involved have determinant one.
pub fn stabilized_pattern(model: &OneVertexModel) -> StabilizedPattern {
    let u = model.canonical_u();
    let n = model.dim();
    let id = identity(n);
    let p = &u - &id;
    let q = &u + &id;
    let half = Complex64::new(0.5, 0.0);
    let mut entries = vec![vec![Vec::new(); n]; n];
    for (r, row) in entries.iter_mut().enumerate() {
        let mut push = |col: usize, shift: Option<(usize, i8)>, c0: Complex64, c1: Complex64| {
            if c0 != ZERO || c1 != ZERO {
                row[col].push(EntryTerm { shift, c0, c1 });
            }
        };
        for j in 0..model.n_internal() {
            let (a, b) = (2 * j, 2 * j + 1);
            // i X_a
            push(a, None, I * p[(r, a)], I * q[(r, a)]);
            // i e^{-ikl} Y_b
            push(a, Some((j, -1)), I * p[(r, b)], -I * q[(r, b)]);
            // Y_a / 2
            push(b, None, half * p[(r, a)], -half * q[(r, a)]);
            // e^{ikl} X_b / 2
            push(b, Some((j, 1)), half * p[(r, b)], half * q[(r, b)]);
        }
        for m in 2 * model.n_internal()..n {
            push(m, None, p[(r, m)], -q[(r, m)]);
        }
    }
    StabilizedPattern { dim: n, entries }
}

impl StabilizedPattern {
    pub fn evaluate(&self, k: Complex64, lengths: &[f64]) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |r, c| {
            self.entries[r][c]
                .iter()
                .map(|t| t.eval(k, lengths))
                .sum::<Complex64>()
        })
    }

    /// The matrix with every `e^{ikl}` replaced by `e^{i theta l}`, a polynomial
    /// pencil in `k`.
    pub fn evaluate_frozen(&self, k: Complex64, theta: Complex64, lengths: &[f64]) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |r, c| {
            self.entries[r][c]
                .iter()
                .map(|t| {
                    let base = t.c0 + t.c1 * k;
                    match t.shift {
                        None => base,
                        Some((e, s)) => base * (I * theta * (s as f64) * lengths[e]).exp(),
                    }
                })
                .sum::<Complex64>()
        })
    }
}

/// Values of `theta` used to freeze the exponentials; generic enough that no
/// two distinct exponent sums collide.
pub(crate) const FROZEN_THETAS: [Complex64; 2] = [
    Complex64::new(0.754_877_666_2, 0.091_3),
    Complex64::new(1.324_717_957_2, -0.057_1),
];

/// Order of vanishing at `k = 0` of `det pencil(k)`, where `pencil` is a matrix
/// polynomial of degree at most one, read off from the determinant's Taylor
/// coefficients (interpolated on the unit circle).
pub(crate) fn pencil_order_at_zero<F>(dim: usize, pencil: F) -> usize
where
    F: Fn(Complex64) -> CMatrix,
{
    let n = dim + 1;
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    let dets: Vec<Complex64> = nodes.iter().map(|&w| pencil(w).determinant()).collect();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|p| {
            nodes
                .iter()
                .zip(&dets)
                .map(|(w, d)| d * w.powu(p as u32).conj())
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    coeffs
        .iter()
        .position(|c| c.norm() > 1e-10 * top)
        .unwrap_or(0)
}

/// Largest `m` such that `k^m` divides the secular function of the model as an
/// exponential polynomial; the same number [`crate::exppoly::ExpPoly::factor_out_k`]
/// finds symbolically.
pub fn k_power(model: &OneVertexModel) -> usize {
    let pattern = stabilized_pattern(model);
    let lengths = model.length_values();
    FROZEN_THETAS
        .iter()
        .map(|&theta| {
            pencil_order_at_zero(pattern.dim, |k| pattern.evaluate_frozen(k, theta, &lengths))
        })
        .min()
        .unwrap_or(0)
}

/// The literal matrix `(U - I) C_1(k) + i k (U + I) C_2(k)` with
/// `C_1 = [[0, 1], [sin kl, cos kl]]`, `C_2 = [[1, 0], [-cos kl, sin kl]]` per
/// internal edge and `C_1 = 1`, `C_2 = i` per lead.
pub fn literal_matrix(model: &OneVertexModel, k: Complex64) -> CMatrix {
    let u = model.canonical_u();
    let n = model.dim();
    let id = identity(n);
    let mut c1 = CMatrix::from_element(n, n, ZERO);
    let mut c2 = CMatrix::from_element(n, n, ZERO);
    for (j, l) in model.length_values().into_iter().enumerate() {
        let (a, b) = (2 * j, 2 * j + 1);
        let (s, c) = ((k * l).sin(), (k * l).cos());
        c1[(a, b)] = Complex64::new(1.0, 0.0);
        c1[(b, a)] = s;
        c1[(b, b)] = c;
        c2[(a, a)] = Complex64::new(1.0, 0.0);
        c2[(b, a)] = -c;
        c2[(b, b)] = s;
    }
    for m in 2 * model.n_internal()..n {
        c1[(m, m)] = Complex64::new(1.0, 0.0);
        c2[(m, m)] = I;
    }
    (&u - &id) * c1 + (&u + &id) * c2 * (I * k)
}
