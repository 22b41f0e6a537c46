//! QGF, a line-oriented text format for quantum graphs.
//!
//! ```text
//! # a loop with two leads
//! graph loop
//! vertex v
//! edge e v v length 1
//! lead f1 v
//! lead f2 v
//! couple v delta 1.5
//! ```
//!
//! Directives:
//!
//! * `graph <name>`
//! * `vertex <id>`
//! * `edge <id> <v> <v> length <int|p/q> [weight <float>]`
//! * `lead <id> <v> [weight <float>]`
//! * `couple <v> <coupling> [order <end-ref>...]`, where `<coupling>` is one of
//!   `kirchhoff`, `antikirchhoff`, `delta <float>`, `deltaprime <float>`,
//!   `robin <float>`, `symmetric <re>,<im> <re>,<im>`, `weightedkirchhoff`, or
//!   `unitary <d> <d*d complex entries, row-major>`
//!
//! Complex literals are written `a+bi`, `a-bi`, `a` or `bi`; end references are
//! `edge.a`, `edge.b` or a lead id. Without `order`, the ends of a vertex are
//! taken in declaration order, internal ends before leads. `#` starts a comment.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::graph::{
    CouplingKind, CouplingSpec, EdgeLength, End, EndRef, GraphError, MetricGraph, UNITARITY_TOL,
};
use crate::linalg::{unitarity_residual, CMatrix};

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QgfErrorKind {
    Syntax(String),
    DimensionMismatch { expected: usize, found: usize },
    UnknownVertex(String),
    UnknownEnd(String),
    NonUnitary { residual: f64 },
    /// The document is well formed but does not describe a valid graph.
    Model(GraphError),
}

impl fmt::Display for QgfErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QgfErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            QgfErrorKind::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            QgfErrorKind::UnknownVertex(v) => write!(f, "unknown vertex `{v}`"),
            QgfErrorKind::UnknownEnd(e) => write!(f, "unknown edge end or lead `{e}`"),
            QgfErrorKind::NonUnitary { residual } => {
                write!(f, "matrix is not unitary (residual {residual:.3e})")
            }
            QgfErrorKind::Model(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{pos}: {kind}")]
pub struct QgfError {
    pub pos: Pos,
    pub kind: QgfErrorKind,
}

impl QgfError {
    fn new(pos: Pos, kind: QgfErrorKind) -> Self {
        Self { pos, kind }
    }

    fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        Self::new(pos, QgfErrorKind::Syntax(msg.into()))
    }

    /// Whether the error is about the graph rather than the text.
    pub fn is_model_error(&self) -> bool {
        matches!(self.kind, QgfErrorKind::Model(_))
    }
}

/// Coupling as written in a file.
#[derive(Clone, Debug, PartialEq)]
pub enum QgfCoupling {
    Kirchhoff,
    AntiKirchhoff,
    Delta(f64),
    DeltaPrime(f64),
    Robin(f64),
    Symmetric(Complex64, Complex64),
    WeightedKirchhoff,
    Unitary { dim: usize, entries: Vec<Complex64> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Directive {
    Graph(String),
    Vertex(String),
    Edge {
        id: String,
        a: String,
        b: String,
        length: Rational64,
        weight: Option<f64>,
    },
    Lead {
        id: String,
        vertex: String,
        weight: Option<f64>,
    },
    Couple {
        vertex: String,
        coupling: QgfCoupling,
        order: Option<Vec<EndRef>>,
    },
}

/// One directive with the position of its first token.
#[derive(Clone, Debug)]
pub struct Statement {
    pub pos: Pos,
    pub directive: Directive,
}

/// Equality ignores source positions.
impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.directive == other.directive
    }
}

/// A parsed and checked QGF file.
#[derive(Clone, Debug, PartialEq)]
pub struct QgfDocument {
    pub statements: Vec<Statement>,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(token(body, s, i, line_no));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(token(body, s, body.len(), line_no));
    }
    out
}

fn token(body: &str, s: usize, e: usize, line_no: usize) -> Token<'_> {
    Token {
        text: &body[s..e],
        pos: Pos {
            line: line_no,
            col: body[..s].chars().count() + 1,
        },
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parses a complex literal `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let real = |t: &str| -> Option<f64> {
        let v = t.parse::<f64>().ok()?;
        v.is_finite().then_some(v)
    };
    let Some(body) = s.strip_suffix('i') else {
        return real(s).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => real(t),
        }
    };
    match split {
        Some(j) => Some(Complex64::new(real(&body[..j])?, imag(&body[j..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Shortest text that parses back to exactly `z`.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}i", z.re, z.im.abs())
}

fn parse_end_ref(s: &str) -> Option<EndRef> {
    match s.rsplit_once('.') {
        Some((edge, "a")) if valid_id(edge) => Some(EndRef::edge(edge, End::A)),
        Some((edge, "b")) if valid_id(edge) => Some(EndRef::edge(edge, End::B)),
        None if valid_id(s) => Some(EndRef::lead(s)),
        _ => None,
    }
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    at: usize,
    line_end: Pos,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<Token<'a>, QgfError> {
        let t = self
            .tokens
            .get(self.at)
            .copied()
            .ok_or_else(|| QgfError::syntax(self.line_end, format!("expected {what}")))?;
        self.at += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.at).copied()
    }

    fn id(&mut self, what: &str) -> Result<(String, Pos), QgfError> {
        let t = self.next(what)?;
        if !valid_id(t.text) {
            return Err(QgfError::syntax(
                t.pos,
                format!("`{}` is not a valid {what} (letters, digits, `_`, `-`)", t.text),
            ));
        }
        Ok((t.text.to_string(), t.pos))
    }

    fn float(&mut self, what: &str) -> Result<f64, QgfError> {
        let t = self.next(what)?;
        t.text
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| QgfError::syntax(t.pos, format!("expected {what}, found `{}`", t.text)))
    }

    fn complex(&mut self, what: &str) -> Result<Complex64, QgfError> {
        let t = self.next(what)?;
        parse_complex(t.text)
            .ok_or_else(|| QgfError::syntax(t.pos, format!("expected {what}, found `{}`", t.text)))
    }

    fn pair(&mut self, what: &str) -> Result<Complex64, QgfError> {
        let t = self.next(what)?;
        let parsed = t.text.split_once(',').and_then(|(re, im)| {
            let re = re.parse::<f64>().ok()?;
            let im = im.parse::<f64>().ok()?;
            (re.is_finite() && im.is_finite()).then_some(Complex64::new(re, im))
        });
        parsed.ok_or_else(|| {
            QgfError::syntax(t.pos, format!("expected {what} as `re,im`, found `{}`", t.text))
        })
    }

    fn optional_weight(&mut self) -> Result<Option<f64>, QgfError> {
        match self.peek() {
            Some(t) if t.text == "weight" => {
                self.at += 1;
                Ok(Some(self.float("a weight")?))
            }
            _ => Ok(None),
        }
    }

    fn finish(&self) -> Result<(), QgfError> {
        match self.peek() {
            Some(t) => Err(QgfError::syntax(t.pos, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }
}

/// Parses and checks a QGF document. Every error carries its source position.
pub fn parse_qgf(text: &str) -> Result<QgfDocument, QgfError> {
    let mut statements = Vec::new();
    // positions of extra information used by the semantic checks
    let mut ref_pos: HashMap<(usize, usize), Pos> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(line, line_no);
        let Some(first) = tokens.first().copied() else {
            continue;
        };
        let mut cur = Cursor {
            tokens,
            at: 1,
            line_end: Pos {
                line: line_no,
                col: line.chars().count() + 1,
            },
        };
        let directive = match first.text {
            "graph" => {
                let rest: Vec<&str> = cur.tokens[1..].iter().map(|t| t.text).collect();
                if rest.is_empty() {
                    return Err(QgfError::syntax(cur.line_end, "expected a graph name"));
                }
                cur.at = cur.tokens.len();
                Directive::Graph(rest.join(" "))
            }
            "vertex" => Directive::Vertex(cur.id("vertex id")?.0),
            "edge" => {
                let (id, _) = cur.id("edge id")?;
                let (a, pa) = cur.id("vertex id")?;
                let (b, pb) = cur.id("vertex id")?;
                ref_pos.insert((statements.len(), 0), pa);
                ref_pos.insert((statements.len(), 1), pb);
                let kw = cur.next("`length`")?;
                if kw.text != "length" {
                    return Err(QgfError::syntax(kw.pos, format!("expected `length`, found `{}`", kw.text)));
                }
                let lt = cur.next("a length")?;
                let length = Rational64::from_str(lt.text).map_err(|_| {
                    QgfError::syntax(lt.pos, format!("length `{}` must be an integer or p/q", lt.text))
                })?;
                let weight = cur.optional_weight()?;
                Directive::Edge {
                    id,
                    a,
                    b,
                    length,
                    weight,
                }
            }
            "lead" => {
                let (id, _) = cur.id("lead id")?;
                let (vertex, pv) = cur.id("vertex id")?;
                ref_pos.insert((statements.len(), 0), pv);
                let weight = cur.optional_weight()?;
                Directive::Lead { id, vertex, weight }
            }
            "couple" => {
                let (vertex, pv) = cur.id("vertex id")?;
                ref_pos.insert((statements.len(), 0), pv);
                let kind = cur.next("a coupling type")?;
                ref_pos.insert((statements.len(), 1), kind.pos);
                let coupling = match kind.text {
                    "kirchhoff" => QgfCoupling::Kirchhoff,
                    "antikirchhoff" => QgfCoupling::AntiKirchhoff,
                    "weightedkirchhoff" => QgfCoupling::WeightedKirchhoff,
                    "delta" => QgfCoupling::Delta(cur.float("a coupling strength")?),
                    "deltaprime" => QgfCoupling::DeltaPrime(cur.float("a coupling strength")?),
                    "robin" => QgfCoupling::Robin(cur.float("a Robin parameter")?),
                    "symmetric" => {
                        let a = cur.pair("a")?;
                        let b = cur.pair("b")?;
                        QgfCoupling::Symmetric(a, b)
                    }
                    "unitary" => {
                        let dt = cur.next("a dimension")?;
                        let dim: usize = dt.text.parse().ok().filter(|d| *d > 0).ok_or_else(|| {
                            QgfError::syntax(dt.pos, format!("expected a positive dimension, found `{}`", dt.text))
                        })?;
                        let mut entries = Vec::with_capacity(dim * dim);
                        while let Some(t) = cur.peek() {
                            if t.text == "order" {
                                break;
                            }
                            entries.push(cur.complex("a complex matrix entry")?);
                        }
                        if entries.len() != dim * dim {
                            return Err(QgfError::new(
                                kind.pos,
                                QgfErrorKind::DimensionMismatch {
                                    expected: dim * dim,
                                    found: entries.len(),
                                },
                            ));
                        }
                        let m = CMatrix::from_row_slice(dim, dim, &entries);
                        let residual = unitarity_residual(&m);
                        if !(residual < UNITARITY_TOL) {
                            return Err(QgfError::new(kind.pos, QgfErrorKind::NonUnitary { residual }));
                        }
                        QgfCoupling::Unitary { dim, entries }
                    }
                    other => {
                        return Err(QgfError::syntax(kind.pos, format!("unknown coupling type `{other}`")))
                    }
                };
                let order = match cur.peek() {
                    Some(t) if t.text == "order" => {
                        cur.at += 1;
                        let mut ends = Vec::new();
                        while let Some(t) = cur.peek() {
                            cur.at += 1;
                            let end = parse_end_ref(t.text).ok_or_else(|| {
                                QgfError::syntax(t.pos, format!("`{}` is not an end reference", t.text))
                            })?;
                            ref_pos.insert((statements.len(), 2 + ends.len()), t.pos);
                            ends.push(end);
                        }
                        if ends.is_empty() {
                            return Err(QgfError::syntax(cur.line_end, "expected end references after `order`"));
                        }
                        Some(ends)
                    }
                    _ => None,
                };
                Directive::Couple {
                    vertex,
                    coupling,
                    order,
                }
            }
            other => {
                return Err(QgfError::syntax(first.pos, format!("unknown directive `{other}`")));
            }
        };
        cur.finish()?;
        statements.push(Statement {
            pos: first.pos,
            directive,
        });
    }
    let doc = QgfDocument { statements };
    check(&doc, &ref_pos)?;
    Ok(doc)
}

/// Cross-references: vertices and ends exist, identifiers are unique, coupling
/// dimensions match vertex degrees.
fn check(doc: &QgfDocument, ref_pos: &HashMap<(usize, usize), Pos>) -> Result<(), QgfError> {
    let at = |i: usize, slot: usize| ref_pos.get(&(i, slot)).copied().unwrap_or(doc.statements[i].pos);
    let mut vertices = HashSet::new();
    let mut ends = HashSet::new();
    let mut graph_seen = false;
    for st in &doc.statements {
        match &st.directive {
            Directive::Graph(_) => {
                if graph_seen {
                    return Err(QgfError::syntax(st.pos, "`graph` given twice"));
                }
                graph_seen = true;
            }
            Directive::Vertex(v) => {
                if !vertices.insert(v.clone()) {
                    return Err(QgfError::new(st.pos, QgfErrorKind::Model(GraphError::DuplicateId(v.clone()))));
                }
            }
            Directive::Edge { id, .. } | Directive::Lead { id, .. } => {
                if !ends.insert(id.clone()) {
                    return Err(QgfError::new(st.pos, QgfErrorKind::Model(GraphError::DuplicateId(id.clone()))));
                }
            }
            Directive::Couple { .. } => {}
        }
    }
    let mut degree: HashMap<&str, Vec<EndRef>> = HashMap::new();
    let mut lead_ids = HashSet::new();
    let mut edge_ids = HashSet::new();
    for (i, st) in doc.statements.iter().enumerate() {
        match &st.directive {
            Directive::Edge { id, a, b, .. } => {
                for (slot, v) in [a, b].into_iter().enumerate() {
                    if !vertices.contains(v) {
                        return Err(QgfError::new(at(i, slot), QgfErrorKind::UnknownVertex(v.clone())));
                    }
                }
                degree.entry(a).or_default().push(EndRef::edge(id.clone(), End::A));
                degree.entry(b).or_default().push(EndRef::edge(id.clone(), End::B));
                edge_ids.insert(id.clone());
            }
            Directive::Lead { id, vertex, .. } => {
                if !vertices.contains(vertex) {
                    return Err(QgfError::new(at(i, 0), QgfErrorKind::UnknownVertex(vertex.clone())));
                }
                lead_ids.insert(id.clone());
            }
            _ => {}
        }
    }
    // leads after internal ends, as in the default order
    for st in &doc.statements {
        if let Directive::Lead { id, vertex, .. } = &st.directive {
            degree.entry(vertex).or_default().push(EndRef::lead(id.clone()));
        }
    }
    let mut coupled = HashSet::new();
    for (i, st) in doc.statements.iter().enumerate() {
        let Directive::Couple {
            vertex,
            coupling,
            order,
        } = &st.directive
        else {
            continue;
        };
        if !vertices.contains(vertex) {
            return Err(QgfError::new(at(i, 0), QgfErrorKind::UnknownVertex(vertex.clone())));
        }
        if !coupled.insert(vertex.clone()) {
            return Err(QgfError::new(
                st.pos,
                QgfErrorKind::Model(GraphError::DuplicateCoupling(vertex.clone())),
            ));
        }
        let incident = degree.get(vertex.as_str()).cloned().unwrap_or_default();
        if let Some(order) = order {
            for (j, end) in order.iter().enumerate() {
                let known = match end {
                    EndRef::Edge { edge, .. } => edge_ids.contains(edge),
                    EndRef::Lead(id) => lead_ids.contains(id),
                };
                if !known {
                    return Err(QgfError::new(at(i, 2 + j), QgfErrorKind::UnknownEnd(end.to_string())));
                }
                if !incident.contains(end) {
                    return Err(QgfError::new(
                        at(i, 2 + j),
                        QgfErrorKind::Model(GraphError::InvalidOrder {
                            vertex: vertex.clone(),
                            reason: format!("`{end}` is not incident to this vertex"),
                        }),
                    ));
                }
            }
            if order.len() != incident.len() {
                return Err(QgfError::new(
                    at(i, 1),
                    QgfErrorKind::DimensionMismatch {
                        expected: incident.len(),
                        found: order.len(),
                    },
                ));
            }
        }
        let fixed = match coupling {
            QgfCoupling::Unitary { dim, .. } => Some(*dim),
            QgfCoupling::Robin(_) => Some(1),
            _ => None,
        };
        if let Some(d) = fixed {
            if d != incident.len() {
                return Err(QgfError::new(
                    at(i, 1),
                    QgfErrorKind::DimensionMismatch {
                        expected: incident.len(),
                        found: d,
                    },
                ));
            }
        }
    }
    Ok(())
}

impl QgfDocument {
    pub fn name(&self) -> Option<&str> {
        self.statements.iter().find_map(|s| match &s.directive {
            Directive::Graph(n) => Some(n.as_str()),
            _ => None,
        })
    }


    /// Builds the graph; model errors point at the offending statement.
    pub fn to_graph(&self) -> Result<MetricGraph, QgfError> {
        let mut b = MetricGraph::builder(self.name().unwrap_or("unnamed"));
        let mut edges = Vec::new();
        let mut leads = Vec::new();
        for st in &self.statements {
            match &st.directive {
                Directive::Vertex(v) => b = b.vertex(v.clone()),
                Directive::Edge {
                    id,
                    a,
                    b: bv,
                    length,
                    weight,
                } => {
                    let w = weight.unwrap_or(1.0);
                    if !(w > 0.0) {
                        return Err(QgfError::new(st.pos, QgfErrorKind::Model(GraphError::InvalidWeight(w))));
                    }
                    if *length <= Rational64::from_integer(0) {
                        return Err(QgfError::new(
                            st.pos,
                            QgfErrorKind::Model(GraphError::NonPositiveLength(id.clone())),
                        ));
                    }
                    edges.push((id.as_str(), a.as_str(), bv.as_str(), w));
                    b = b.edge_weighted(id.clone(), a.clone(), bv.clone(), *length, w);
                }
                Directive::Lead { id, vertex, weight } => {
                    let w = weight.unwrap_or(1.0);
                    if !(w > 0.0) {
                        return Err(QgfError::new(st.pos, QgfErrorKind::Model(GraphError::InvalidWeight(w))));
                    }
                    leads.push((id.as_str(), vertex.as_str(), w));
                    b = b.lead_weighted(id.clone(), vertex.clone(), w);
                }
                _ => {}
            }
        }
        let weight_of = |end: &EndRef| -> f64 {
            match end {
                EndRef::Edge { edge, .. } => edges.iter().find(|e| e.0 == edge).map_or(1.0, |e| e.3),
                EndRef::Lead(id) => leads.iter().find(|l| l.0 == id).map_or(1.0, |l| l.2),
            }
        };
        let mut coupled = HashSet::new();
        for st in &self.statements {
            let Directive::Couple {
                vertex,
                coupling,
                order,
            } = &st.directive
            else {
                continue;
            };
            let ends = match order {
                Some(o) => o.clone(),
                None => {
                    let mut out = Vec::new();
                    for e in &edges {
                        if e.1 == vertex {
                            out.push(EndRef::edge(e.0, End::A));
                        }
                        if e.2 == vertex {
                            out.push(EndRef::edge(e.0, End::B));
                        }
                    }
                    out.extend(leads.iter().filter(|l| l.1 == vertex).map(|l| EndRef::lead(l.0)));
                    out
                }
            };
            let weights: Vec<f64> = ends.iter().map(weight_of).collect();
            let spec = coupling_spec(coupling);
            spec.resolve(ends.len(), &weights)
                .map_err(|e| QgfError::new(st.pos, QgfErrorKind::Model(e)))?;
            coupled.insert(vertex.as_str());
            b = match order {
                Some(o) => b.couple_ordered(vertex.clone(), spec, o.clone()),
                None => b.couple(vertex.clone(), spec),
            };
        }
        for st in &self.statements {
            if let Directive::Vertex(v) = &st.directive {
                if !coupled.contains(v.as_str()) {
                    return Err(QgfError::new(
                        st.pos,
                        QgfErrorKind::Model(GraphError::MissingCoupling(v.clone())),
                    ));
                }
            }
        }
        let fallback = self.statements.first().map(|s| s.pos).unwrap_or_default();
        b.build().map_err(|e| QgfError::new(fallback, QgfErrorKind::Model(e)))
    }
}

fn coupling_spec(c: &QgfCoupling) -> CouplingSpec {
    match c {
        QgfCoupling::Kirchhoff => CouplingSpec::Kirchhoff,
        QgfCoupling::AntiKirchhoff => CouplingSpec::AntiKirchhoff,
        QgfCoupling::Delta(x) => CouplingSpec::Delta(*x),
        QgfCoupling::DeltaPrime(x) => CouplingSpec::DeltaPrime(*x),
        QgfCoupling::Robin(x) => CouplingSpec::Robin(*x),
        QgfCoupling::Symmetric(a, b) => CouplingSpec::Symmetric { a: *a, b: *b },
        QgfCoupling::WeightedKirchhoff => CouplingSpec::WeightedKirchhoff,
        QgfCoupling::Unitary { dim, entries } => {
            CouplingSpec::Unitary(CMatrix::from_row_slice(*dim, *dim, entries))
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let weight = |f: &mut fmt::Formatter<'_>, w: &Option<f64>| match w {
            Some(w) => write!(f, " weight {w:?}"),
            None => Ok(()),
        };
        match self {
            Directive::Graph(name) => write!(f, "graph {name}"),
            Directive::Vertex(v) => write!(f, "vertex {v}"),
            Directive::Edge {
                id,
                a,
                b,
                length,
                weight: w,
            } => {
                write!(f, "edge {id} {a} {b} length {length}")?;
                weight(f, w)
            }
            Directive::Lead { id, vertex, weight: w } => {
                write!(f, "lead {id} {vertex}")?;
                weight(f, w)
            }
            Directive::Couple {
                vertex,
                coupling,
                order,
            } => {
                write!(f, "couple {vertex} ")?;
                match coupling {
                    QgfCoupling::Kirchhoff => write!(f, "kirchhoff")?,
                    QgfCoupling::AntiKirchhoff => write!(f, "antikirchhoff")?,
                    QgfCoupling::WeightedKirchhoff => write!(f, "weightedkirchhoff")?,
                    QgfCoupling::Delta(x) => write!(f, "delta {x:?}")?,
                    QgfCoupling::DeltaPrime(x) => write!(f, "deltaprime {x:?}")?,
                    QgfCoupling::Robin(x) => write!(f, "robin {x:?}")?,
                    QgfCoupling::Symmetric(a, b) => {
                        write!(f, "symmetric {:?},{:?} {:?},{:?}", a.re, a.im, b.re, b.im)?
                    }
                    QgfCoupling::Unitary { dim, entries } => {
                        write!(f, "unitary {dim}")?;
                        for z in entries {
                            write!(f, " {}", format_complex(*z))?;
                        }
                    }
                }
                if let Some(order) = order {
                    write!(f, " order")?;
                    for e in order {
                        write!(f, " {e}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for QgfDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for st in &self.statements {
            writeln!(f, "{}", st.directive)?;
        }
        Ok(())
    }
}

pub fn print_qgf(doc: &QgfDocument) -> String {
    doc.to_string()
}

/// Describes a graph as a QGF document. Couplings without a named kind are
/// written as explicit unitary matrices.
pub fn graph_to_document(graph: &MetricGraph) -> Result<QgfDocument, GraphError> {
    let mut out = vec![Directive::Graph(graph.name.clone())];
    let weight = |w: f64| (w != 1.0).then_some(w);
    out.extend(graph.vertices().iter().map(|v| Directive::Vertex(v.clone())));
    for e in graph.edges() {
        let length = match e.length {
            EdgeLength::Exact(r) => r,
            EdgeLength::Numeric(x) => {
                return Err(GraphError::ConversionFailure(format!(
                    "edge `{}` has irrational length {x:?}, which QGF cannot represent",
                    e.id
                )))
            }
        };
        out.push(Directive::Edge {
            id: e.id.clone(),
            a: e.a.clone(),
            b: e.b.clone(),
            length,
            weight: weight(e.weight),
        });
    }
    for l in graph.leads() {
        out.push(Directive::Lead {
            id: l.id.clone(),
            vertex: l.vertex.clone(),
            weight: weight(l.weight),
        });
    }
    for (v, c) in graph.vertices().iter().zip(graph.couplings()) {
        let coupling = match &c.kind {
            CouplingKind::Kirchhoff => QgfCoupling::Kirchhoff,
            CouplingKind::AntiKirchhoff => QgfCoupling::AntiKirchhoff,
            CouplingKind::Delta { alpha } => QgfCoupling::Delta(*alpha),
            CouplingKind::DeltaPrime { beta } => QgfCoupling::DeltaPrime(*beta),
            CouplingKind::Robin { c } => QgfCoupling::Robin(*c),
            CouplingKind::Symmetric { a, b } => QgfCoupling::Symmetric(*a, *b),
            CouplingKind::WeightedKirchhoff => QgfCoupling::WeightedKirchhoff,
            CouplingKind::General => {
                let n = c.matrix.nrows();
                let entries = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| c.matrix[(i, j)])
                    .collect();
                QgfCoupling::Unitary { dim: n, entries }
            }
        };
        let order = (c.edge_end_order != graph.default_order(v)).then(|| c.edge_end_order.clone());
        out.push(Directive::Couple {
            vertex: v.clone(),
            coupling,
            order,
        });
    }
    let statements = out
        .into_iter()
        .enumerate()
        .map(|(i, directive)| Statement {
            pos: Pos { line: i + 1, col: 1 },
            directive,
        })
        .collect();
    Ok(QgfDocument { statements })
}

pub fn graph_to_qgf(graph: &MetricGraph) -> Result<String, GraphError> {
    graph_to_document(graph).map(|d| d.to_string())
}
