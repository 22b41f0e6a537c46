//! The resonance condition of a weighted graph written in its original
//! variables: `-c^2 f'' = k^2 f` on each edge, so `f = a sin(kx/c) + b cos(kx/c)`
//! on internal edges and `f = t e^{ikx/c}` on leads.

use num_complex::Complex64;

use super::ZeroError;
use crate::graph::{CouplingKind, EndRef, MetricGraph};
use crate::linalg::{identity, max_abs_diff, CMatrix, I, ONE, ZERO};

#[derive(Clone, Debug)]
enum VertexRows {
    /// Continuity of values and `sum c^2 f' = 0`.
    WeightedKirchhoff,
    Dirichlet,
    Neumann,
    /// Unit weights: `(U - I) f + i (U + I) f' = 0`.
    Unitary(CMatrix),
}

#[derive(Clone, Debug)]
struct Vertex {
    ends: Vec<(Slot, f64)>,
    rows: VertexRows,
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    A(usize),
    B(usize),
    Lead(usize),
}

#[derive(Clone, Debug)]
pub struct WeightedSystem {
    lengths: Vec<f64>,
    edge_weights: Vec<f64>,
    lead_weights: Vec<f64>,
    vertices: Vec<Vertex>,
}

impl WeightedSystem {
    pub fn new(graph: &MetricGraph) -> Result<Self, ZeroError> {
        let mut vertices = Vec::new();
        for (v, coupling) in graph.vertices().iter().zip(graph.couplings()) {
            let d = coupling.degree();
            let mut ends = Vec::with_capacity(d);
            for end in &coupling.edge_end_order {
                let slot = match end {
                    EndRef::Edge { edge, end } => {
                        let j = graph.edge_index(edge).expect("validated graph");
                        match end {
                            crate::graph::End::A => Slot::A(j),
                            crate::graph::End::B => Slot::B(j),
                        }
                    }
                    EndRef::Lead(id) => Slot::Lead(graph.lead_index(id).expect("validated graph")),
                };
                ends.push((slot, graph.end_weight(end).unwrap_or(1.0)));
            }
            let id = identity(d);
            let rows = if coupling.kind == CouplingKind::WeightedKirchhoff {
                VertexRows::WeightedKirchhoff
            } else if max_abs_diff(&coupling.matrix, &(-&id)) < 1e-12 {
                VertexRows::Dirichlet
            } else if max_abs_diff(&coupling.matrix, &id) < 1e-12 {
                VertexRows::Neumann
            } else if ends.iter().all(|e| e.1 == 1.0) {
                VertexRows::Unitary(coupling.matrix.clone())
            } else {
                return Err(ZeroError::InvalidInput(format!(
                    "vertex `{v}`: only weighted Kirchhoff, Dirichlet and Neumann conditions are \
                     supported on weighted ends"
                )));
            };
            vertices.push(Vertex { ends, rows });
        }
        Ok(Self {
            lengths: graph.edges().iter().map(|e| e.length.value()).collect(),
            edge_weights: graph.edges().iter().map(|e| e.weight).collect(),
            lead_weights: graph.leads().iter().map(|l| l.weight).collect(),
            vertices,
        })
    }

    fn dim(&self) -> usize {
        2 * self.lengths.len() + self.lead_weights.len()
    }

    /// Value and outward derivative of an end as linear forms in the unknowns
    /// `(a_0, b_0, a_1, b_1, ..., t_0, t_1, ...)`.
    fn end_forms(&self, slot: Slot, k: Complex64, phase: Complex64) -> Vec<(usize, Complex64, Complex64)> {
        let n = self.lengths.len();
        match slot {
            Slot::A(j) => {
                let kc = k / self.edge_weights[j];
                vec![(2 * j, ZERO, kc), (2 * j + 1, ONE, ZERO)]
            }
            Slot::B(j) => {
                let kc = k / self.edge_weights[j];
                let arg = phase / self.edge_weights[j] * self.lengths[j];
                let (s, c) = (arg.sin(), arg.cos());
                vec![(2 * j, s, -kc * c), (2 * j + 1, c, kc * s)]
            }
            Slot::Lead(m) => vec![(2 * n + m, ONE, I * k / self.lead_weights[m])],
        }
    }

    pub fn matrix(&self, k: Complex64) -> CMatrix {
        self.assemble(k, k)
    }

    /// [`Self::matrix`] with the oscillating factors evaluated at `theta` instead of `k`.
    pub fn matrix_frozen(&self, k: Complex64, theta: Complex64) -> CMatrix {
        self.assemble(k, theta)
    }

    /// Order of vanishing at `k = 0` shared by all exponential terms of the determinant.
    pub fn k_power(&self) -> usize {
        crate::secular::FROZEN_THETAS
            .iter()
            .map(|&t| crate::secular::pencil_order_at_zero(self.dim(), |k| self.matrix_frozen(k, t)))
            .min()
            .unwrap_or(0)
    }

    fn assemble(&self, k: Complex64, phase: Complex64) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::from_element(dim, dim, ZERO);
        let mut row = 0;
        for v in &self.vertices {
            let forms: Vec<_> = v.ends.iter().map(|(s, _)| self.end_forms(*s, k, phase)).collect();
            let d = v.ends.len();
            match &v.rows {
                VertexRows::WeightedKirchhoff => {
                    for e in 0..d - 1 {
                        for &(col, val, _) in &forms[e] {
                            m[(row, col)] += val;
                        }
                        for &(col, val, _) in &forms[e + 1] {
                            m[(row, col)] -= val;
                        }
                        row += 1;
                    }
                    for (e, f) in forms.iter().enumerate() {
                        let w2 = v.ends[e].1 * v.ends[e].1;
                        for &(col, _, der) in f {
                            m[(row, col)] += der * w2;
                        }
                    }
                    row += 1;
                }
                VertexRows::Dirichlet | VertexRows::Neumann => {
                    let dirichlet = matches!(v.rows, VertexRows::Dirichlet);
                    for f in &forms {
                        for &(col, val, der) in f {
                            m[(row, col)] += if dirichlet { val } else { der };
                        }
                        row += 1;
                    }
                }
                VertexRows::Unitary(u) => {
                    let id = identity(d);
                    let a = u - &id;
                    let b = (u + &id) * I;
                    for r in 0..d {
                        for (e, f) in forms.iter().enumerate() {
                            for &(col, val, der) in f {
                                m[(row, col)] += a[(r, e)] * val + b[(r, e)] * der;
                            }
                        }
                        row += 1;
                    }
                }
            }
        }
        m
    }
}
