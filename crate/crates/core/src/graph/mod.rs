//! Metric graphs with unitary vertex couplings, weighted edges and the
//! flattening to a single "big vertex" model.

mod coupling;
mod model;
mod weighted;

pub use coupling::{
    coupling_anti_kirchhoff, coupling_delta, coupling_delta_prime, coupling_general,
    coupling_kirchhoff, coupling_robin, coupling_symmetric, coupling_weighted_kirchhoff,
    unitary_from_linear_conditions, weighted_conditions_for_ends, weighted_kirchhoff_conditions,
    CouplingAssignment, CouplingKind, UNITARITY_TOL,
};
pub use model::{apply_lead_mixing, flatten, split_blocks, EndSlot, OneVertexModel, VertexBlock};
pub use weighted::{rational_approximation, scale_to_unweighted};

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::CMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid degree {0}: a coupling needs at least one edge end")]
    InvalidDegree(usize),
    #[error("invalid weight {0}: weights must be positive")]
    InvalidWeight(f64),
    #[error("edge {0} has non-positive length")]
    NonPositiveLength(String),
    #[error("linear conditions are not self-adjoint: {0}")]
    NotSelfAdjoint(String),
    #[error("conversion to unitary form failed: {0}")]
    ConversionFailure(String),
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("symmetric coupling a={a}, b={b} violates |b| = 1, |b + a d| = 1 for d = {degree}")]
    InvalidSymmetric {
        a: Complex64,
        b: Complex64,
        degree: usize,
    },
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge or lead `{0}`")]
    UnknownEdge(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("vertex `{0}` has no coupling")]
    MissingCoupling(String),
    #[error("vertex `{0}` is coupled more than once")]
    DuplicateCoupling(String),
    #[error("invalid edge-end order at vertex `{vertex}`: {reason}")]
    InvalidOrder { vertex: String, reason: String },
    #[error("unsupported coupling: {0}")]
    UnsupportedCoupling(String),
    #[error("invalid lead mixer: {0}")]
    InvalidMixer(String),
    #[error("graph `{0}` carries non-unit weights; rescale it with scale_to_unweighted first")]
    WeightedGraph(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    /// the `x = 0` end
    A,
    /// the `x = l` end
    B,
}

/// Reference to one end of an internal edge or to a lead.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EndRef {
    Edge { edge: String, end: End },
    Lead(String),
}

impl EndRef {
    pub fn edge(id: impl Into<String>, end: End) -> Self {
        EndRef::Edge {
            edge: id.into(),
            end,
        }
    }

    pub fn lead(id: impl Into<String>) -> Self {
        EndRef::Lead(id.into())
    }
}

impl fmt::Display for EndRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndRef::Edge { edge, end: End::A } => write!(f, "{edge}.a"),
            EndRef::Edge { edge, end: End::B } => write!(f, "{edge}.b"),
            EndRef::Lead(id) => write!(f, "{id}"),
        }
    }
}

/// Edge length. Graph input always uses exact rationals; `Numeric` only appears
/// after rescaling by an irrational weight, and such graphs are refused by the
/// symbolic engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeLength {
    Exact(Rational64),
    Numeric(f64),
}

impl EdgeLength {
    pub fn value(&self) -> f64 {
        match self {
            EdgeLength::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            EdgeLength::Numeric(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<Rational64> {
        match self {
            EdgeLength::Exact(r) => Some(*r),
            EdgeLength::Numeric(_) => None,
        }
    }
}

impl fmt::Display for EdgeLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLength::Exact(r) => write!(f, "{r}"),
            EdgeLength::Numeric(x) => write!(f, "{x:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InternalEdge {
    pub id: String,
    pub a: String,
    pub b: String,
    pub length: EdgeLength,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lead {
    pub id: String,
    pub vertex: String,
    pub weight: f64,
}

/// How a vertex coupling is requested; resolved against the vertex degree and
/// the incident weights when the graph is built.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingSpec {
    Kirchhoff,
    AntiKirchhoff,
    Delta(f64),
    DeltaPrime(f64),
    Robin(f64),
    Symmetric { a: Complex64, b: Complex64 },
    WeightedKirchhoff,
    Unitary(CMatrix),
    /// An already-built assignment (its kind tag is kept).
    Assignment(CouplingAssignment),
}

impl CouplingSpec {
    pub(crate) fn resolve(&self, degree: usize, weights: &[f64]) -> Result<CouplingAssignment, GraphError> {
        match self {
            CouplingSpec::Kirchhoff => coupling_kirchhoff(degree),
            CouplingSpec::AntiKirchhoff => coupling_anti_kirchhoff(degree),
            CouplingSpec::Delta(alpha) => coupling_delta(degree, *alpha),
            CouplingSpec::DeltaPrime(beta) => coupling_delta_prime(degree, *beta),
            CouplingSpec::Robin(c) => {
                if degree != 1 {
                    return Err(GraphError::DimensionMismatch {
                        context: "robin coupling".into(),
                        expected: 1,
                        found: degree,
                    });
                }
                coupling_robin(*c)
            }
            CouplingSpec::Symmetric { a, b } => coupling_symmetric(degree, *a, *b),
            CouplingSpec::WeightedKirchhoff => coupling_weighted_kirchhoff(weights),
            CouplingSpec::Unitary(m) => coupling_general(m.clone()),
            CouplingSpec::Assignment(a) => {
                let res = crate::linalg::unitarity_residual(&a.matrix);
                if !(res < UNITARITY_TOL) {
                    return Err(GraphError::NotUnitary { residual: res });
                }
                Ok(a.clone())
            }
        }
    }
}

/// A finite metric graph: vertices, internal edges of exact rational length,
/// semi-infinite leads and one unitary coupling per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    pub name: String,
    vertices: Vec<String>,
    edges: Vec<InternalEdge>,
    leads: Vec<Lead>,
    couplings: Vec<CouplingAssignment>,
}

impl MetricGraph {
    pub fn builder(name: impl Into<String>) -> GraphBuilder {
        GraphBuilder {
            name: name.into(),
            ..GraphBuilder::default()
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[InternalEdge] {
        &self.edges
    }

    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    /// Couplings aligned with [`Self::vertices`].
    pub fn couplings(&self) -> &[CouplingAssignment] {
        &self.couplings
    }

    pub fn coupling(&self, vertex: &str) -> Option<&CouplingAssignment> {
        self.vertex_index(vertex).map(|i| &self.couplings[i])
    }

    pub fn vertex_index(&self, vertex: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == vertex)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn lead_index(&self, id: &str) -> Option<usize> {
        self.leads.iter().position(|l| l.id == id)
    }

    pub fn n_internal(&self) -> usize {
        self.edges.len()
    }

    pub fn n_leads(&self) -> usize {
        self.leads.len()
    }

    /// Geometric size `V = sum of internal edge lengths`.
    pub fn size(&self) -> EdgeLength {
        sum_lengths(self.edges.iter().map(|e| e.length))
    }

    /// Size of the weighted graph, `sum l_j / c_j`.
    pub fn weighted_size(&self) -> f64 {
        self.edges.iter().map(|e| e.length.value() / e.weight).sum()
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| e.weight != 1.0) || self.leads.iter().any(|l| l.weight != 1.0)
    }

    /// Weight attached to an edge end (edge weight for internal ends, lead weight otherwise).
    pub fn end_weight(&self, end: &EndRef) -> Option<f64> {
        match end {
            EndRef::Edge { edge, .. } => self.edge_index(edge).map(|i| self.edges[i].weight),
            EndRef::Lead(id) => self.lead_index(id).map(|i| self.leads[i].weight),
        }
    }

    /// Incident ends of a vertex in declaration order, internal ends before leads.
    pub fn default_order(&self, vertex: &str) -> Vec<EndRef> {
        default_order(vertex, &self.edges, &self.leads)
    }

    /// `(internal ends, leads)` incident to a vertex.
    pub fn vertex_balance(&self, vertex: &str) -> (usize, usize) {
        let ends = self.default_order(vertex);
        let q = ends.iter().filter(|e| matches!(e, EndRef::Lead(_))).count();
        (ends.len() - q, q)
    }

    /// Returns a copy with the coupling of one vertex replaced.
    pub fn with_coupling(
        &self,
        vertex: &str,
        coupling: CouplingAssignment,
    ) -> Result<MetricGraph, GraphError> {
        let idx = self
            .vertex_index(vertex)
            .ok_or_else(|| GraphError::UnknownVertex(vertex.into()))?;
        let mut g = self.clone();
        let order = if coupling.edge_end_order.is_empty() {
            g.couplings[idx].edge_end_order.clone()
        } else {
            coupling.edge_end_order.clone()
        };
        if coupling.degree() != order.len() {
            return Err(GraphError::DimensionMismatch {
                context: format!("coupling at vertex `{vertex}`"),
                expected: order.len(),
                found: coupling.degree(),
            });
        }
        g.couplings[idx] = coupling.with_order(order);
        Ok(g)
    }

    pub(crate) fn from_parts(
        name: String,
        vertices: Vec<String>,
        edges: Vec<InternalEdge>,
        leads: Vec<Lead>,
        couplings: Vec<CouplingAssignment>,
    ) -> MetricGraph {
        MetricGraph {
            name,
            vertices,
            edges,
            leads,
            couplings,
        }
    }
}

fn sum_lengths(lengths: impl Iterator<Item = EdgeLength>) -> EdgeLength {
    let mut exact = Some(Rational64::zero());
    let mut approx = 0.0;
    for l in lengths {
        approx += l.value();
        exact = match (exact, l) {
            (Some(acc), EdgeLength::Exact(r)) => Some(acc + r),
            _ => None,
        };
    }
    match exact {
        Some(r) => EdgeLength::Exact(r),
        None => EdgeLength::Numeric(approx),
    }
}

fn default_order(vertex: &str, edges: &[InternalEdge], leads: &[Lead]) -> Vec<EndRef> {
    let mut out = Vec::new();
    for e in edges {
        if e.a == vertex {
            out.push(EndRef::edge(e.id.clone(), End::A));
        }
        if e.b == vertex {
            out.push(EndRef::edge(e.id.clone(), End::B));
        }
    }
    for l in leads {
        if l.vertex == vertex {
            out.push(EndRef::lead(l.id.clone()));
        }
    }
    out
}

/// Incremental constructor for [`MetricGraph`]; all invariants are checked in [`GraphBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    name: String,
    vertices: Vec<String>,
    edges: Vec<InternalEdge>,
    leads: Vec<Lead>,
    couplings: Vec<(String, CouplingSpec, Option<Vec<EndRef>>)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.vertices.push(id.into());
        self
    }

    pub fn edge(self, id: impl Into<String>, a: impl Into<String>, b: impl Into<String>, length: Rational64) -> Self {
        self.edge_weighted(id, a, b, length, 1.0)
    }

    pub fn edge_weighted(
        self,
        id: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        length: Rational64,
        weight: f64,
    ) -> Self {
        self.edge_with_length(id, a, b, EdgeLength::Exact(length), weight)
    }

    pub fn edge_with_length(
        mut self,
        id: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        length: EdgeLength,
        weight: f64,
    ) -> Self {
        self.edges.push(InternalEdge {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            length,
            weight,
        });
        self
    }

    pub fn lead(self, id: impl Into<String>, vertex: impl Into<String>) -> Self {
        self.lead_weighted(id, vertex, 1.0)
    }

    pub fn lead_weighted(mut self, id: impl Into<String>, vertex: impl Into<String>, weight: f64) -> Self {
        self.leads.push(Lead {
            id: id.into(),
            vertex: vertex.into(),
            weight,
        });
        self
    }

    pub fn couple(mut self, vertex: impl Into<String>, spec: CouplingSpec) -> Self {
        self.couplings.push((vertex.into(), spec, None));
        self
    }

    pub fn couple_ordered(mut self, vertex: impl Into<String>, spec: CouplingSpec, order: Vec<EndRef>) -> Self {
        self.couplings.push((vertex.into(), spec, Some(order)));
        self
    }

    pub fn build(self) -> Result<MetricGraph, GraphError> {
        let mut ids = HashSet::new();
        for v in &self.vertices {
            if !ids.insert(format!("v:{v}")) {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let mut end_ids = HashSet::new();
        for e in &self.edges {
            if !end_ids.insert(e.id.clone()) {
                return Err(GraphError::DuplicateId(e.id.clone()));
            }
            for v in [&e.a, &e.b] {
                if !self.vertices.contains(v) {
                    return Err(GraphError::UnknownVertex(v.clone()));
                }
            }
            let positive = match e.length {
                EdgeLength::Exact(r) => r > Rational64::zero(),
                EdgeLength::Numeric(x) => x > 0.0 && x.is_finite(),
            };
            if !positive {
                return Err(GraphError::NonPositiveLength(e.id.clone()));
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(GraphError::InvalidWeight(e.weight));
            }
        }
        for l in &self.leads {
            if !end_ids.insert(l.id.clone()) {
                return Err(GraphError::DuplicateId(l.id.clone()));
            }
            if !self.vertices.contains(&l.vertex) {
                return Err(GraphError::UnknownVertex(l.vertex.clone()));
            }
            if !(l.weight > 0.0) || !l.weight.is_finite() {
                return Err(GraphError::InvalidWeight(l.weight));
            }
        }

        let mut by_vertex: HashMap<&str, (&CouplingSpec, &Option<Vec<EndRef>>)> = HashMap::new();
        for (v, spec, order) in &self.couplings {
            if !self.vertices.contains(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
            if by_vertex.insert(v.as_str(), (spec, order)).is_some() {
                return Err(GraphError::DuplicateCoupling(v.clone()));
            }
        }

        let mut couplings = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let (spec, order) = by_vertex
                .get(v.as_str())
                .ok_or_else(|| GraphError::MissingCoupling(v.clone()))?;
            let incident = default_order(v, &self.edges, &self.leads);
            let order = match order {
                Some(o) => {
                    check_order(v, o, &incident)?;
                    o.clone()
                }
                None => incident,
            };
            if order.is_empty() {
                return Err(GraphError::InvalidDegree(0));
            }
            let weights: Vec<f64> = order
                .iter()
                .map(|end| match end {
                    EndRef::Edge { edge, .. } => self.edges.iter().find(|e| &e.id == edge).unwrap().weight,
                    EndRef::Lead(id) => self.leads.iter().find(|l| &l.id == id).unwrap().weight,
                })
                .collect();
            let assignment = spec.resolve(order.len(), &weights)?;
            if assignment.degree() != order.len() {
                return Err(GraphError::DimensionMismatch {
                    context: format!("coupling at vertex `{v}`"),
                    expected: order.len(),
                    found: assignment.degree(),
                });
            }
            couplings.push(assignment.with_order(order));
        }

        Ok(MetricGraph {
            name: self.name,
            vertices: self.vertices,
            edges: self.edges,
            leads: self.leads,
            couplings,
        })
    }
}

fn check_order(vertex: &str, order: &[EndRef], incident: &[EndRef]) -> Result<(), GraphError> {
    let err = |reason: String| GraphError::InvalidOrder {
        vertex: vertex.into(),
        reason,
    };
    if order.len() != incident.len() {
        return Err(err(format!(
            "{} ends listed, vertex has degree {}",
            order.len(),
            incident.len()
        )));
    }
    let mut seen = HashSet::new();
    for end in order {
        if !incident.contains(end) {
            return Err(err(format!("`{end}` is not incident to this vertex")));
        }
        if !seen.insert(end.clone()) {
            return Err(err(format!("`{end}` listed twice")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn loop_with_two_leads_counts_both_ends() {
        let g = MetricGraph::builder("loop")
            .vertex("v")
            .edge("e", "v", "v", r(1))
            .lead("f1", "v")
            .lead("f2", "v")
            .couple("v", CouplingSpec::Kirchhoff)
            .build()
            .unwrap();
        assert_eq!(g.coupling("v").unwrap().degree(), 4);
        assert_eq!(g.vertex_balance("v"), (2, 2));
        assert_eq!(g.size(), EdgeLength::Exact(r(1)));
    }

    #[test]
    fn unknown_vertex_rejected() {
        let err = MetricGraph::builder("bad")
            .vertex("v")
            .edge("e", "v", "w", r(1))
            .couple("v", CouplingSpec::Kirchhoff)
            .build()
            .unwrap_err();
        assert_eq!(err, GraphError::UnknownVertex("w".into()));
    }

    #[test]
    fn missing_and_duplicate_couplings() {
        let base = MetricGraph::builder("g").vertex("v").lead("f", "v");
        assert_eq!(
            base.clone().build().unwrap_err(),
            GraphError::MissingCoupling("v".into())
        );
        let err = base
            .couple("v", CouplingSpec::Kirchhoff)
            .couple("v", CouplingSpec::Kirchhoff)
            .build()
            .unwrap_err();
        assert_eq!(err, GraphError::DuplicateCoupling("v".into()));
    }

    #[test]
    fn coupling_dimension_must_match_degree() {
        let m = crate::linalg::identity(2);
        let err = MetricGraph::builder("g")
            .vertex("v")
            .lead("f", "v")
            .couple("v", CouplingSpec::Unitary(m))
            .build()
            .unwrap_err();
        assert!(matches!(err, GraphError::DimensionMismatch { .. }));
    }

    #[test]
    fn explicit_order_validated() {
        let g = MetricGraph::builder("g")
            .vertex("v")
            .vertex("w")
            .edge("e", "v", "w", r(1))
            .lead("f", "v")
            .couple_ordered(
                "v",
                CouplingSpec::Kirchhoff,
                vec![EndRef::lead("f"), EndRef::edge("e", End::A)],
            )
            .couple("w", CouplingSpec::Robin(0.0))
            .build()
            .unwrap();
        assert_eq!(g.coupling("v").unwrap().edge_end_order[0], EndRef::lead("f"));

        let err = MetricGraph::builder("g")
            .vertex("v")
            .vertex("w")
            .edge("e", "v", "w", r(1))
            .lead("f", "v")
            .couple_ordered("v", CouplingSpec::Kirchhoff, vec![EndRef::lead("f"), EndRef::lead("f")])
            .couple("w", CouplingSpec::Robin(0.0))
            .build()
            .unwrap_err();
        assert!(matches!(err, GraphError::InvalidOrder { .. }));
    }

    #[test]
    fn nonpositive_length_and_weight_rejected() {
        let err = MetricGraph::builder("g")
            .vertex("v")
            .edge("e", "v", "v", r(0))
            .couple("v", CouplingSpec::Kirchhoff)
            .build()
            .unwrap_err();
        assert_eq!(err, GraphError::NonPositiveLength("e".into()));
        let err = MetricGraph::builder("g")
            .vertex("v")
            .lead_weighted("f", "v", -1.0)
            .couple("v", CouplingSpec::Kirchhoff)
            .build()
            .unwrap_err();
        assert_eq!(err, GraphError::InvalidWeight(-1.0));
    }

    #[test]
    fn weighted_size_divides_by_weight() {
        let g = MetricGraph::builder("w")
            .vertex("v")
            .vertex("u")
            .edge_weighted("e", "v", "u", r(1), 2.0)
            .lead("f", "v")
            .couple("v", CouplingSpec::WeightedKirchhoff)
            .couple("u", CouplingSpec::Robin(0.0))
            .build()
            .unwrap();
        assert!(g.is_weighted());
        assert!((g.weighted_size() - 0.5).abs() < 1e-15);
    }
}
