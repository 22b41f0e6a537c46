use num_complex::Complex64;
use num_rational::Rational64;

use super::{End, EdgeLength, EndRef, GraphError, MetricGraph, UNITARITY_TOL};
use crate::linalg::{unitarity_residual, CMatrix, ZERO};

/// What a row/column of the big coupling matrix refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EndSlot {
    Internal { edge: usize, end: End },
    Lead(usize),
}

impl EndSlot {
    /// Position in the internal-first ordering: edge `j` occupies `2j` (end A)
    /// and `2j + 1` (end B), lead `m` sits at `2N + m`.
    pub fn canonical_index(&self, n_internal: usize) -> usize {
        match *self {
            EndSlot::Internal { edge, end: End::A } => 2 * edge,
            EndSlot::Internal { edge, end: End::B } => 2 * edge + 1,
            EndSlot::Lead(m) => 2 * n_internal + m,
        }
    }

    pub fn is_lead(&self) -> bool {
        matches!(self, EndSlot::Lead(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexBlock {
    pub vertex: String,
    pub start: usize,
    pub dim: usize,
}

/// The whole graph seen as one vertex with a block-diagonal `(2N+M) x (2N+M)`
/// unitary coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct OneVertexModel {
    n_internal: usize,
    n_leads: usize,
    big_u: CMatrix,
    lengths: Vec<EdgeLength>,
    index_map: Vec<EndSlot>,
    blocks: Vec<VertexBlock>,
}

impl OneVertexModel {
    /// Assemble a model directly. `index_map` must cover every end exactly once
    /// and `big_u` must be unitary.
    pub fn from_parts(
        big_u: CMatrix,
        lengths: Vec<EdgeLength>,
        index_map: Vec<EndSlot>,
        blocks: Vec<VertexBlock>,
        n_leads: usize,
    ) -> Result<Self, GraphError> {
        let n_internal = lengths.len();
        let dim = 2 * n_internal + n_leads;
        if big_u.shape() != (dim, dim) || index_map.len() != dim {
            return Err(GraphError::DimensionMismatch {
                context: "one-vertex model".into(),
                expected: dim,
                found: big_u.nrows(),
            });
        }
        let mut seen = vec![false; dim];
        for slot in &index_map {
            let c = slot.canonical_index(n_internal);
            if c >= dim || seen[c] {
                return Err(GraphError::InvalidOrder {
                    vertex: "<model>".into(),
                    reason: format!("slot {slot:?} is out of range or repeated"),
                });
            }
            seen[c] = true;
        }
        let residual = unitarity_residual(&big_u);
        if !(residual < UNITARITY_TOL) {
            return Err(GraphError::NotUnitary { residual });
        }
        Ok(Self {
            n_internal,
            n_leads,
            big_u,
            lengths,
            index_map,
            blocks,
        })
    }

    pub fn n_internal(&self) -> usize {
        self.n_internal
    }

    pub fn n_leads(&self) -> usize {
        self.n_leads
    }

    pub fn dim(&self) -> usize {
        2 * self.n_internal + self.n_leads
    }

    /// Block-diagonal coupling in declared (per-vertex) order.
    pub fn big_u(&self) -> &CMatrix {
        &self.big_u
    }

    pub fn index_map(&self) -> &[EndSlot] {
        &self.index_map
    }

    pub fn blocks(&self) -> &[VertexBlock] {
        &self.blocks
    }

    pub fn lengths(&self) -> &[EdgeLength] {
        &self.lengths
    }

    pub fn length_values(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l.value()).collect()
    }

    /// `Some` only when every length is an exact rational.
    pub fn exact_lengths(&self) -> Option<Vec<Rational64>> {
        self.lengths.iter().map(|l| l.exact()).collect()
    }

    pub fn size(&self) -> EdgeLength {
        super::sum_lengths(self.lengths.iter().copied())
    }

    /// `perm[c]` is the declared position of canonical index `c`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm = vec![0; self.dim()];
        for (pos, slot) in self.index_map.iter().enumerate() {
            perm[slot.canonical_index(self.n_internal)] = pos;
        }
        perm
    }

    /// `P^T U P` with internal ends first (edge by edge, end A then B), leads last.
    pub fn canonical_u(&self) -> CMatrix {
        let perm = self.permutation();
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.big_u[(perm[i], perm[j])])
    }

    /// Inverse of [`Self::canonical_u`]: maps a canonical-order matrix back to declared order.
    pub fn from_canonical(&self, canonical: &CMatrix) -> CMatrix {
        let perm = self.permutation();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = canonical[(i, j)];
            }
        }
        out
    }

    /// Blocks `(U_1, U_2, U_3, U_4)` of the canonical matrix.
    pub fn partition(&self) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
        split_blocks(&self.canonical_u(), 2 * self.n_internal)
    }

    /// The coupling block of one vertex, reordered so internal ends come first,
    /// with the number of internal ends `p` and leads `q`.
    pub fn vertex_partition(&self, block: usize) -> (CMatrix, usize, usize) {
        let b = &self.blocks[block];
        let local: Vec<usize> = (0..b.dim).collect();
        let (mut internal, leads): (Vec<usize>, Vec<usize>) = local
            .into_iter()
            .partition(|&i| !self.index_map[b.start + i].is_lead());
        let p = internal.len();
        let q = leads.len();
        internal.extend(leads);
        let m = CMatrix::from_fn(b.dim, b.dim, |i, j| {
            self.big_u[(b.start + internal[i], b.start + internal[j])]
        });
        (m, p, q)
    }

    pub fn block_index(&self, vertex: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.vertex == vertex)
    }

    /// Swap the two ends of internal edge `edge` (orientation reversal).
    pub fn flip_edge(&self, edge: usize) -> OneVertexModel {
        let mut out = self.clone();
        for slot in out.index_map.iter_mut() {
            if let EndSlot::Internal { edge: e, end } = slot {
                if *e == edge {
                    *end = match end {
                        End::A => End::B,
                        End::B => End::A,
                    };
                }
            }
        }
        out
    }
}

pub fn split_blocks(u: &CMatrix, split: usize) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let n = u.nrows();
    let m = n - split;
    (
        u.view((0, 0), (split, split)).into_owned(),
        u.view((0, split), (split, m)).into_owned(),
        u.view((split, 0), (m, split)).into_owned(),
        u.view((split, split), (m, m)).into_owned(),
    )
}

/// Flatten a graph to the one-vertex model: one diagonal block per vertex, in
/// vertex declaration order, rows within a block in the vertex's edge-end order.
pub fn flatten(graph: &MetricGraph) -> Result<OneVertexModel, GraphError> {
    if graph.is_weighted() {
        return Err(GraphError::WeightedGraph(graph.name.clone()));
    }
    let n = graph.n_internal();
    let m = graph.n_leads();
    let dim = 2 * n + m;
    let mut big_u = CMatrix::from_element(dim, dim, ZERO);
    let mut index_map = Vec::with_capacity(dim);
    let mut blocks = Vec::with_capacity(graph.vertices().len());
    for (vertex, coupling) in graph.vertices().iter().zip(graph.couplings()) {
        let start = index_map.len();
        for end in &coupling.edge_end_order {
            let slot = match end {
                EndRef::Edge { edge, end } => EndSlot::Internal {
                    edge: graph
                        .edge_index(edge)
                        .ok_or_else(|| GraphError::UnknownEdge(edge.clone()))?,
                    end: *end,
                },
                EndRef::Lead(id) => EndSlot::Lead(
                    graph
                        .lead_index(id)
                        .ok_or_else(|| GraphError::UnknownEdge(id.clone()))?,
                ),
            };
            index_map.push(slot);
        }
        let d = coupling.degree();
        big_u
            .view_mut((start, start), (d, d))
            .copy_from(&coupling.matrix);
        blocks.push(VertexBlock {
            vertex: vertex.clone(),
            start,
            dim: d,
        });
    }
    let lengths = graph.edges().iter().map(|e| e.length).collect();
    OneVertexModel::from_parts(big_u, lengths, index_map, blocks, m)
}

/// Replace one vertex block `U` by `W^{-1} U W` with
/// `W = diag(e^{i phi} I_p, W_4)` acting on (internal ends, leads) of that vertex.
/// Leads are taken in the order they appear in the block.
pub fn apply_lead_mixing(
    model: &OneVertexModel,
    vertex: &str,
    phase: f64,
    w4: &CMatrix,
) -> Result<OneVertexModel, GraphError> {
    let bi = model
        .block_index(vertex)
        .ok_or_else(|| GraphError::UnknownVertex(vertex.into()))?;
    let block = &model.blocks[bi];
    let lead_local: Vec<usize> = (0..block.dim)
        .filter(|&i| model.index_map[block.start + i].is_lead())
        .collect();
    let q = lead_local.len();
    if w4.shape() != (q, q) {
        return Err(GraphError::InvalidMixer(format!(
            "vertex `{vertex}` has {q} leads but W4 is {}x{}",
            w4.nrows(),
            w4.ncols()
        )));
    }
    let residual = unitarity_residual(w4);
    if q > 0 && !(residual < UNITARITY_TOL) {
        return Err(GraphError::InvalidMixer(format!(
            "W4 is not unitary (residual {residual:.3e})"
        )));
    }
    let d = block.dim;
    let mut w = CMatrix::from_element(d, d, ZERO);
    let rot = Complex64::from_polar(1.0, phase);
    for i in 0..d {
        if !model.index_map[block.start + i].is_lead() {
            w[(i, i)] = rot;
        }
    }
    for (a, &ia) in lead_local.iter().enumerate() {
        for (b, &ib) in lead_local.iter().enumerate() {
            w[(ia, ib)] = w4[(a, b)];
        }
    }
    let u = model
        .big_u
        .view((block.start, block.start), (d, d))
        .into_owned();
    // W is unitary, so W^{-1} = W^*.
    let mixed = w.adjoint() * u * &w;
    let mut out = model.clone();
    out.big_u
        .view_mut((block.start, block.start), (d, d))
        .copy_from(&mixed);
    let residual = unitarity_residual(&out.big_u);
    if !(residual < UNITARITY_TOL) {
        return Err(GraphError::NotUnitary { residual });
    }
    Ok(out)
}
