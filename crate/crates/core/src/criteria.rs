//! Per-vertex detection of non-Weyl asymptotics through the energy-dependent
//! effective coupling `U~(k) = U_1 - (1 - k) U_2 [(1 - k) U_4 - (1 + k) I]^{-1} U_3`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{split_blocks, CouplingKind, MetricGraph, OneVertexModel};
use crate::linalg::{identity, max_abs, CMatrix, I, ONE};

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("effective coupling evaluated too close to a pole at k = {k}")]
    PoleProximity { k: Complex64 },
    #[error("criterion inconclusive: {0}")]
    Inconclusive(String),
    #[error("unsupported coupling: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Knobs of the randomized identity test.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionConfig {
    pub samples: usize,
    pub max_resamples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        Self {
            samples: 8,
            max_resamples: 32,
            seed: DEFAULT_SEED,
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `(1 - k) / (1 + k)`
    MinusOverPlus,
    /// `(1 + k) / (1 - k)`
    PlusOverMinus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::MinusOverPlus, Branch::PlusOverMinus];

    pub fn value(self, k: Complex64) -> Complex64 {
        match self {
            Branch::MinusOverPlus => (ONE - k) / (ONE + k),
            Branch::PlusOverMinus => (ONE + k) / (ONE - k),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::MinusOverPlus => write!(f, "(1-k)/(1+k)"),
            Branch::PlusOverMinus => write!(f, "(1+k)/(1-k)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    SampledEigenvalue,
    SymmetricClosedForm,
    WeightedBalance,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::SampledEigenvalue => write!(f, "sampled-eigenvalue"),
            Method::SymmetricClosedForm => write!(f, "symmetric-closed-form"),
            Method::WeightedBalance => write!(f, "weighted-balance"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexClassification {
    pub vertex: String,
    pub non_weyl: bool,
    /// Set only when `non_weyl` is true.
    pub branch: Option<Branch>,
    pub method: Method,
    /// Largest scaled determinant over the samples of the winning (or best) branch.
    pub residual: f64,
}

/// `U~(k)` for one block partition.
#[derive(Clone, Debug)]
pub struct EffectiveCoupling {
    pub u1: CMatrix,
    pub u2: CMatrix,
    pub u3: CMatrix,
    pub u4: CMatrix,
}

impl EffectiveCoupling {
    pub fn p(&self) -> usize {
        self.u1.nrows()
    }

    pub fn q(&self) -> usize {
        self.u4.nrows()
    }

    /// Smallest singular value of `(1 - k) U_4 - (1 + k) I` and its norm.
    pub fn pole_guard(&self, k: Complex64) -> (f64, f64) {
        let q = self.q();
        if q == 0 {
            return (1.0, 1.0);
        }
        let bracket = &self.u4 * (ONE - k) - identity(q) * (ONE + k);
        let sv = bracket.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        (min, max)
    }

    pub fn eval(&self, k: Complex64) -> Result<CMatrix, CriteriaError> {
        let q = self.q();
        if q == 0 {
            return Ok(self.u1.clone());
        }
        let (min, max) = self.pole_guard(k);
        if !(min >= 1e-12 * max) || max == 0.0 {
            return Err(CriteriaError::PoleProximity { k });
        }
        let bracket = &self.u4 * (ONE - k) - identity(q) * (ONE + k);
        let inv = bracket
            .try_inverse()
            .ok_or(CriteriaError::PoleProximity { k })?;
        Ok(&self.u1 - &self.u2 * inv * &self.u3 * (ONE - k))
    }
}

/// Partition a `(p + q)`-square block (internal ends first) into `U_1..U_4`.
pub fn effective_coupling(u: &CMatrix, p: usize, q: usize) -> Result<EffectiveCoupling, CriteriaError> {
    if u.shape() != (p + q, p + q) {
        return Err(CriteriaError::InvalidInput(format!(
            "block is {}x{}, expected {}",
            u.nrows(),
            u.ncols(),
            p + q
        )));
    }
    let (u1, u2, u3, u4) = split_blocks(u, p);
    Ok(EffectiveCoupling { u1, u2, u3, u4 })
}

/// Closed form of `U~(k)` for `U = aJ + bI`.
pub fn symmetric_effective_coupling(
    a: Complex64,
    b: Complex64,
    p: usize,
    q: usize,
    k: Complex64,
) -> Result<CMatrix, CriteriaError> {
    if q == 0 {
        return Err(CriteriaError::InvalidInput(
            "the closed form needs at least one lead".into(),
        ));
    }
    let d = (p + q) as f64;
    if (b.norm() - 1.0).abs() > 1e-10 || ((b + a * d).norm() - 1.0).abs() > 1e-10 {
        return Err(CriteriaError::InvalidInput(format!(
            "a={a}, b={b} is not unitary for degree {}",
            p + q
        )));
    }
    let num = a * b * (ONE - k) - a * (ONE + k);
    let den = (a * q as f64 + b) * (ONE - k) - (k + ONE);
    if den.norm() < 1e-12 {
        return Err(CriteriaError::PoleProximity { k });
    }
    Ok(CMatrix::from_element(p, p, num / den) + identity(p) * b)
}

/// `(aJ_n + bI_n)^{-1} = I/b - a/(b (b + n a)) J`.
pub fn symmetric_inverse(a: Complex64, b: Complex64, n: usize) -> CMatrix {
    identity(n) / b - CMatrix::from_element(n, n, a / (b * (b + a * n as f64)))
}

fn sample_k(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
}

/// Evaluates `f` at `config.samples` deterministic pseudo-random points,
/// skipping points where it reports a pole.
fn sample_values<F>(config: &CriterionConfig, salt: u64, mut f: F) -> Result<Vec<f64>, CriteriaError>
where
    F: FnMut(Complex64) -> Result<f64, CriteriaError>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ salt);
    let mut out = Vec::with_capacity(config.samples);
    let mut misses = 0;
    while out.len() < config.samples {
        let k = sample_k(&mut rng);
        match f(k) {
            Ok(v) => out.push(v),
            Err(CriteriaError::PoleProximity { .. }) => {
                misses += 1;
                if misses > config.max_resamples {
                    return Err(CriteriaError::Inconclusive(format!(
                        "{misses} samples hit poles of the effective coupling"
                    )));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `|det M| / max(1, max |M_ij|)^dim`.
fn scaled_det(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let scale = max_abs(m).max(1.0);
    m.determinant().norm() / scale.powi(m.nrows() as i32)
}

/// Decides whether `U~(k)` has eigenvalue `(1-k)/(1+k)` or `(1+k)/(1-k)` for all `k`.
pub fn vertex_nonweyl_test(u: &CMatrix, p: usize, q: usize) -> Result<VertexClassification, CriteriaError> {
    vertex_nonweyl_test_with(u, p, q, &CriterionConfig::default())
}

pub fn vertex_nonweyl_test_with(
    u: &CMatrix,
    p: usize,
    q: usize,
    config: &CriterionConfig,
) -> Result<VertexClassification, CriteriaError> {
    let eff = effective_coupling(u, p, q)?;
    let mut best = f64::INFINITY;
    for (n, branch) in Branch::ALL.into_iter().enumerate() {
        let values = sample_values(config, n as u64 + 1, |k| {
            let lambda = branch.value(k);
            if !lambda.is_finite() || (ONE + k).norm() < 1e-6 || (ONE - k).norm() < 1e-6 {
                return Err(CriteriaError::PoleProximity { k });
            }
            let m = eff.eval(k)? - identity(p) * lambda;
            Ok(scaled_det(&m))
        })?;
        let worst = values.iter().cloned().fold(0.0, f64::max);
        if p > 0 && worst < config.tolerance {
            return Ok(VertexClassification {
                vertex: String::new(),
                non_weyl: true,
                branch: Some(branch),
                method: Method::SampledEigenvalue,
                residual: worst,
            });
        }
        best = best.min(worst);
    }
    Ok(VertexClassification {
        vertex: String::new(),
        non_weyl: false,
        branch: None,
        method: Method::SampledEigenvalue,
        residual: best,
    })
}

/// Closed-form verdict for `U = aJ + bI` with `p` internal ends and `q` leads.
pub fn classify_symmetric_vertex(a: Complex64, b: Complex64, p: usize, q: usize) -> VertexClassification {
    let close = |x: Complex64, y: Complex64| (x - y).norm() < 1e-10;
    let mut out = VertexClassification {
        vertex: String::new(),
        non_weyl: false,
        branch: None,
        method: Method::SymmetricClosedForm,
        residual: 0.0,
    };
    if p == q && p > 0 {
        let inv_p = 1.0 / p as f64;
        if (close(a, Complex64::new(inv_p, 0.0)) && close(b, -ONE))
            || (close(a, Complex64::new(-inv_p, 0.0)) && close(b, ONE))
        {
            out.non_weyl = true;
            out.branch = Some(Branch::MinusOverPlus);
        }
    }
    out
}

/// Balance of a weighted-Kirchhoff vertex: internal weight sum equals lead weight sum.
pub fn weighted_balance_test(internal: &[f64], external: &[f64]) -> Result<VertexClassification, CriteriaError> {
    if internal.iter().chain(external).any(|w| !(*w > 0.0)) {
        return Err(CriteriaError::InvalidInput("weights must be positive".into()));
    }
    let si: f64 = internal.iter().sum();
    let se: f64 = external.iter().sum();
    let gap = (si - se).abs();
    let non_weyl = gap < 1e-10 * (si + se);
    Ok(VertexClassification {
        vertex: String::new(),
        non_weyl,
        branch: non_weyl.then_some(Branch::MinusOverPlus),
        method: Method::WeightedBalance,
        residual: gap,
    })
}

/// [`weighted_balance_test`] for a vertex of a graph.
pub fn weighted_balance_for_vertex(graph: &MetricGraph, vertex: &str) -> Result<VertexClassification, CriteriaError> {
    let coupling = graph
        .coupling(vertex)
        .ok_or_else(|| CriteriaError::InvalidInput(format!("unknown vertex `{vertex}`")))?;
    if coupling.kind != CouplingKind::WeightedKirchhoff {
        return Err(CriteriaError::Unsupported(format!(
            "vertex `{vertex}` does not carry a weighted Kirchhoff coupling"
        )));
    }
    let mut internal = Vec::new();
    let mut external = Vec::new();
    for end in &coupling.edge_end_order {
        let w = graph.end_weight(end).unwrap_or(f64::NAN);
        match end {
            crate::graph::EndRef::Edge { .. } => internal.push(w),
            crate::graph::EndRef::Lead(_) => external.push(w),
        }
    }
    let mut out = weighted_balance_test(&internal, &external)?;
    out.vertex = vertex.to_string();
    Ok(out)
}

/// Runs the eigenvalue test on every vertex block of a model.
pub fn classify_model(
    model: &OneVertexModel,
    config: &CriterionConfig,
) -> Result<Vec<VertexClassification>, CriteriaError> {
    (0..model.blocks().len())
        .map(|b| {
            let (u, p, q) = model.vertex_partition(b);
            let mut c = vertex_nonweyl_test_with(&u, p, q, config)?;
            c.vertex = model.blocks()[b].vertex.clone();
            Ok(c)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremeSign {
    Plus,
    Minus,
}

/// `(i/2)^N det[(U~(k) - I) +- k (U~(k) + I)]` for the whole model.
pub fn extreme_coefficient(model: &OneVertexModel, sign: ExtremeSign, k: Complex64) -> Result<Complex64, CriteriaError> {
    let (u1, u2, u3, u4) = model.partition();
    let eff = EffectiveCoupling { u1, u2, u3, u4 };
    let ut = eff.eval(k)?;
    let n2 = ut.nrows();
    let id = identity(n2);
    let s = match sign {
        ExtremeSign::Plus => k,
        ExtremeSign::Minus => -k,
    };
    let m = (&ut - &id) + (&ut + &id) * s;
    Ok((I / 2.0).powi(model.n_internal() as i32) * m.determinant())
}

/// Whether the extreme coefficient vanishes identically, by the sampled test.
pub fn extreme_coefficient_vanishes(
    model: &OneVertexModel,
    sign: ExtremeSign,
    config: &CriterionConfig,
) -> Result<bool, CriteriaError> {
    let salt = match sign {
        ExtremeSign::Plus => 11,
        ExtremeSign::Minus => 12,
    };
    let n = model.n_internal() as i32;
    let values = sample_values(config, salt, |k| {
        let v = extreme_coefficient(model, sign, k)?;
        let scale = (1.0 + k.norm()).powi(2 * n) * 0.5f64.powi(n);
        Ok(v.norm() / scale)
    })?;
    Ok(values.iter().all(|v| *v < config.tolerance))
}
