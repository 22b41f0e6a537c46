//! Vertex coupling matrices in the unitary form `(U - I) psi + i (U + I) psi' = 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{EndRef, GraphError};
use crate::linalg::{identity, ones, unitarity_residual, CMatrix, I, ONE, ZERO};

/// Absolute tolerance on `max |U U^* - I|` for every coupling matrix.
pub const UNITARITY_TOL: f64 = 1e-10;

const SELF_ADJOINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum CouplingKind {
    Kirchhoff,
    AntiKirchhoff,
    Delta { alpha: f64 },
    DeltaPrime { beta: f64 },
    Robin { c: f64 },
    Symmetric { a: Complex64, b: Complex64 },
    General,
    WeightedKirchhoff,
}

impl CouplingKind {
    /// Permutation-symmetric parameters `(a, b)` with `U = aJ + bI`, when the kind has them.
    pub fn symmetric_parameters(&self, degree: usize) -> Option<(Complex64, Complex64)> {
        let d = degree as f64;
        match *self {
            CouplingKind::Kirchhoff => Some((Complex64::new(2.0 / d, 0.0), -ONE)),
            CouplingKind::AntiKirchhoff => Some((Complex64::new(-2.0 / d, 0.0), ONE)),
            CouplingKind::Delta { alpha } => Some((2.0 / Complex64::new(d, alpha), -ONE)),
            CouplingKind::DeltaPrime { beta } => Some((-2.0 / Complex64::new(d, -beta), ONE)),
            CouplingKind::Symmetric { a, b } => Some((a, b)),
            _ => None,
        }
    }
}

/// A unitary vertex coupling together with the edge ends its rows refer to.
///
/// `edge_end_order` is empty for couplings that have not yet been attached to
/// a vertex of a [`super::MetricGraph`].
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingAssignment {
    pub kind: CouplingKind,
    pub matrix: CMatrix,
    pub edge_end_order: Vec<EndRef>,
}

impl CouplingAssignment {
    fn checked(kind: CouplingKind, matrix: CMatrix) -> Result<Self, GraphError> {
        let residual = unitarity_residual(&matrix);
        if !(residual < UNITARITY_TOL) {
            return Err(GraphError::NotUnitary { residual });
        }
        Ok(Self {
            kind,
            matrix,
            edge_end_order: Vec::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_order(mut self, order: Vec<EndRef>) -> Self {
        self.edge_end_order = order;
        self
    }
}

fn check_degree(degree: usize) -> Result<(), GraphError> {
    if degree < 1 {
        Err(GraphError::InvalidDegree(degree))
    } else {
        Ok(())
    }
}

/// delta coupling `U = 2/(d + i alpha) J - I`; `alpha = 0` is Kirchhoff.
pub fn coupling_delta(degree: usize, alpha: f64) -> Result<CouplingAssignment, GraphError> {
    check_degree(degree)?;
    let a = 2.0 / Complex64::new(degree as f64, alpha);
    let u = ones(degree) * a - identity(degree);
    let kind = if alpha == 0.0 {
        CouplingKind::Kirchhoff
    } else {
        CouplingKind::Delta { alpha }
    };
    CouplingAssignment::checked(kind, u)
}

/// delta'_s coupling `U = -2/(d - i beta) J + I`; `beta = 0` is anti-Kirchhoff.
pub fn coupling_delta_prime(degree: usize, beta: f64) -> Result<CouplingAssignment, GraphError> {
    check_degree(degree)?;
    let a = -2.0 / Complex64::new(degree as f64, -beta);
    let u = ones(degree) * a + identity(degree);
    let kind = if beta == 0.0 {
        CouplingKind::AntiKirchhoff
    } else {
        CouplingKind::DeltaPrime { beta }
    };
    CouplingAssignment::checked(kind, u)
}

pub fn coupling_kirchhoff(degree: usize) -> Result<CouplingAssignment, GraphError> {
    coupling_delta(degree, 0.0)
}

pub fn coupling_anti_kirchhoff(degree: usize) -> Result<CouplingAssignment, GraphError> {
    coupling_delta_prime(degree, 0.0)
}

/// Robin endpoint `u + c u' = 0` with `u'` the outward derivative.
pub fn coupling_robin(c: f64) -> Result<CouplingAssignment, GraphError> {
    let mut out = unitary_from_linear_conditions(
        &CMatrix::from_element(1, 1, ONE),
        &CMatrix::from_element(1, 1, Complex64::new(c, 0.0)),
    )?;
    out.kind = CouplingKind::Robin { c };
    Ok(out)
}

/// Permutation-symmetric coupling `U = aJ + bI`; needs `|b| = 1` and `|b + a d| = 1`.
pub fn coupling_symmetric(
    degree: usize,
    a: Complex64,
    b: Complex64,
) -> Result<CouplingAssignment, GraphError> {
    check_degree(degree)?;
    let d = degree as f64;
    if (b.norm() - 1.0).abs() > UNITARITY_TOL || ((b + a * d).norm() - 1.0).abs() > UNITARITY_TOL {
        return Err(GraphError::InvalidSymmetric { a, b, degree });
    }
    CouplingAssignment::checked(CouplingKind::Symmetric { a, b }, ones(degree) * a + identity(degree) * b)
}

/// Any unitary matrix, tagged `General`.
pub fn coupling_general(matrix: CMatrix) -> Result<CouplingAssignment, GraphError> {
    if matrix.nrows() != matrix.ncols() {
        return Err(GraphError::DimensionMismatch {
            context: "unitary coupling".into(),
            expected: matrix.nrows(),
            found: matrix.ncols(),
        });
    }
    check_degree(matrix.nrows())?;
    CouplingAssignment::checked(CouplingKind::General, matrix)
}

/// Converts `A psi + B psi' = 0` into `U = -(A + iB)^{-1} (A - iB)`.
pub fn unitary_from_linear_conditions(
    a: &CMatrix,
    b: &CMatrix,
) -> Result<CouplingAssignment, GraphError> {
    let d = a.nrows();
    if a.shape() != (d, d) || b.shape() != (d, d) {
        return Err(GraphError::DimensionMismatch {
            context: "linear vertex conditions".into(),
            expected: d,
            found: b.nrows().max(a.ncols()),
        });
    }
    check_degree(d)?;

    let mut compound = CMatrix::zeros(d, 2 * d);
    compound.view_mut((0, 0), (d, d)).copy_from(a);
    compound.view_mut((0, d), (d, d)).copy_from(b);
    let sv = compound.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin < SELF_ADJOINT_TOL * smax {
        return Err(GraphError::NotSelfAdjoint(format!(
            "(A|B) has rank below {d} (singular values {smin:.3e} / {smax:.3e})"
        )));
    }
    let abh = a * b.adjoint();
    let skew = crate::linalg::max_abs_diff(&abh, &abh.adjoint());
    if skew > SELF_ADJOINT_TOL * crate::linalg::max_abs(&abh).max(1.0) {
        return Err(GraphError::NotSelfAdjoint(format!(
            "A B* is not self-adjoint (skew part {skew:.3e})"
        )));
    }

    let plus = a + b * I;
    let minus = a - b * I;
    let inv = plus
        .try_inverse()
        .ok_or_else(|| GraphError::ConversionFailure("A + iB is singular".into()))?;
    let u = -(inv * minus);
    CouplingAssignment::checked(CouplingKind::General, u)
}

/// Linear conditions for generalised Kirchhoff matching after rescaling edge
/// functions to unit weight: `g_e / sqrt(c_e)` continuous and
/// `sum_e sqrt(c_e) g_e' = 0`. Ends are ordered internal first, then leads.
pub fn weighted_kirchhoff_conditions(
    internal_weights: &[f64],
    external_weights: &[f64],
) -> Result<(CMatrix, CMatrix), GraphError> {
    let weights: Vec<f64> = internal_weights
        .iter()
        .chain(external_weights)
        .copied()
        .collect();
    weighted_conditions_for_ends(&weights)
}

/// Same as [`weighted_kirchhoff_conditions`] for an arbitrary end order.
pub fn weighted_conditions_for_ends(weights: &[f64]) -> Result<(CMatrix, CMatrix), GraphError> {
    let d = weights.len();
    check_degree(d)?;
    if let Some(&w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(GraphError::InvalidWeight(w));
    }
    let mut a = DMatrix::from_element(d, d, ZERO);
    let mut b = DMatrix::from_element(d, d, ZERO);
    for e in 0..d - 1 {
        a[(e, e)] = Complex64::new(1.0 / weights[e].sqrt(), 0.0);
        a[(e, e + 1)] = Complex64::new(-1.0 / weights[e + 1].sqrt(), 0.0);
    }
    for (e, w) in weights.iter().enumerate() {
        b[(d - 1, e)] = Complex64::new(w.sqrt(), 0.0);
    }
    Ok((a, b))
}

pub fn coupling_weighted_kirchhoff(weights: &[f64]) -> Result<CouplingAssignment, GraphError> {
    let (a, b) = weighted_conditions_for_ends(weights)?;
    let mut out = unitary_from_linear_conditions(&a, &b)?;
    out.kind = CouplingKind::WeightedKirchhoff;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kirchhoff_degree_two_is_swap() {
        let u = coupling_delta(2, 0.0).unwrap();
        assert_eq!(u.kind, CouplingKind::Kirchhoff);
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(max_abs_diff(&u.matrix, &expected) < 1e-15);
    }

    #[test]
    fn kirchhoff_degree_three() {
        let u = coupling_delta(3, 0.0).unwrap();
        let expected = ones(3) * c(2.0 / 3.0, 0.0) - identity(3);
        assert!(max_abs_diff(&u.matrix, &expected) < 1e-15);
    }

    #[test]
    fn delta_with_strength_is_unitary() {
        let u = coupling_delta(2, 1.0).unwrap();
        assert_eq!(u.kind, CouplingKind::Delta { alpha: 1.0 });
        let a = 2.0 / c(2.0, 1.0);
        let expected = ones(2) * a - identity(2);
        assert!(max_abs_diff(&u.matrix, &expected) < 1e-15);
        assert!(unitarity_residual(&u.matrix) < 1e-12);
    }

    #[test]
    fn anti_kirchhoff_degree_two() {
        let u = coupling_delta_prime(2, 0.0).unwrap();
        assert_eq!(u.kind, CouplingKind::AntiKirchhoff);
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, -ONE, ZERO]);
        assert!(max_abs_diff(&u.matrix, &expected) < 1e-15);
    }

    #[test]
    fn anti_kirchhoff_balanced_form() {
        // degree 2p with p = 2: U = -(1/p) J + I
        let u = coupling_delta_prime(4, 0.0).unwrap();
        let expected = ones(4) * c(-0.5, 0.0) + identity(4);
        assert!(max_abs_diff(&u.matrix, &expected) < 1e-15);
    }

    #[test]
    fn delta_prime_with_strength_is_unitary() {
        let u = coupling_delta_prime(3, 2.0).unwrap();
        assert!(unitarity_residual(&u.matrix) < 1e-12);
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(matches!(coupling_delta(0, 0.0), Err(GraphError::InvalidDegree(0))));
        assert!(matches!(
            coupling_delta_prime(0, 1.0),
            Err(GraphError::InvalidDegree(0))
        ));
    }

    #[test]
    fn dirichlet_and_neumann_from_linear_conditions() {
        let one = CMatrix::from_element(1, 1, ONE);
        let zero = CMatrix::from_element(1, 1, ZERO);
        let dir = unitary_from_linear_conditions(&one, &zero).unwrap();
        assert!((dir.matrix[(0, 0)] + ONE).norm() < 1e-15);
        let neu = unitary_from_linear_conditions(&zero, &one).unwrap();
        assert!((neu.matrix[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn robin_formula_and_boundary_residual() {
        for &cc in &[0.0, 0.3, -2.0, 7.5] {
            let u = coupling_robin(cc).unwrap().matrix[(0, 0)];
            let expected = -(ONE - I * cc) / (ONE + I * cc);
            assert!((u - expected).norm() < 1e-14);
            // (U - 1) psi + i (U + 1) psi' = 0 must be proportional to psi + c psi' = 0
            let coef_val = u - ONE;
            let coef_der = I * (u + ONE);
            assert!((coef_der - coef_val * cc).norm() < 1e-13);
        }
        assert!((coupling_robin(0.0).unwrap().matrix[(0, 0)] + ONE).norm() < 1e-15);
    }

    #[test]
    fn non_self_adjoint_conditions_rejected() {
        // A = [1], B = [i]: A B* = -i is not self-adjoint
        let a = CMatrix::from_element(1, 1, ONE);
        let b = CMatrix::from_element(1, 1, I);
        assert!(matches!(
            unitary_from_linear_conditions(&a, &b),
            Err(GraphError::NotSelfAdjoint(_))
        ));
        // rank deficient
        let z = CMatrix::zeros(2, 2);
        let mut a2 = CMatrix::zeros(2, 2);
        a2[(0, 0)] = ONE;
        assert!(matches!(
            unitary_from_linear_conditions(&a2, &z),
            Err(GraphError::NotSelfAdjoint(_))
        ));
    }

    #[test]
    fn unit_weights_give_kirchhoff() {
        let w = coupling_weighted_kirchhoff(&[1.0, 1.0, 1.0]).unwrap();
        let k = coupling_delta(3, 0.0).unwrap();
        assert!(max_abs_diff(&w.matrix, &k.matrix) < 1e-10);
    }

    #[test]
    fn single_internal_weight_is_neumann() {
        let (a, b) = weighted_kirchhoff_conditions(&[2.5], &[]).unwrap();
        let u = unitary_from_linear_conditions(&a, &b).unwrap();
        assert!((u.matrix[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn weighted_example_satisfies_rescaled_conditions() {
        // c = 2 on the internal edge, unit weights on the two leads
        let weights = [2.0, 1.0, 1.0];
        let w = coupling_weighted_kirchhoff(&weights).unwrap();
        let u = &w.matrix;
        let id = identity(3);
        // psi = -i (U + I) w, psi' = (U - I) w solves (U - I) psi + i (U + I) psi' = 0
        // and spans all solutions as w runs over a basis.
        let vals = (u + &id) * (-I);
        let ders = u - &id;
        let kernel: Vec<Vec<Complex64>> = (0..3)
            .map(|j| vals.column(j).iter().chain(ders.column(j).iter()).copied().collect())
            .collect();
        for v in kernel {
            let (g, dg) = (&v[..3], &v[3..]);
            let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
            assert!((g[0] / s[0] - g[1] / s[1]).norm() < 1e-10);
            assert!((g[1] / s[1] - g[2] / s[2]).norm() < 1e-10);
            let flux: Complex64 = (0..3).map(|e| dg[e] * s[e]).sum();
            assert!(flux.norm() < 1e-10);
        }
    }

    #[test]
    fn nonpositive_weight_rejected() {
        assert!(matches!(
            weighted_kirchhoff_conditions(&[1.0], &[0.0]),
            Err(GraphError::InvalidWeight(_))
        ));
    }

    #[test]
    fn symmetric_constraints_checked() {
        assert!(coupling_symmetric(3, c(1.0 / 3.0 * 2.0, 0.0), -ONE).is_ok());
        assert!(matches!(
            coupling_symmetric(3, c(0.5, 0.0), -ONE),
            Err(GraphError::InvalidSymmetric { .. })
        ));
    }

    #[test]
    fn non_unitary_general_rejected() {
        let m = CMatrix::from_element(2, 2, ONE);
        assert!(matches!(coupling_general(m), Err(GraphError::NotUnitary { .. })));
    }
}
