//! Built-in example graphs and closed-form resonance conditions for them.
//!
//! Every example is addressable by name with `key=value` parameters, e.g.
//! `loop-two-leads:alpha=0.5,beta=1` or `polygon:n=5,l=1/2`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::graph::{
    unitary_from_linear_conditions, CouplingSpec, End, EndRef, GraphError, MetricGraph,
};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::zeros::{Rect, ZeroRecord, ZeroStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalleryError {
    #[error("invalid example: {0}")]
    InvalidExample(String),
    #[error("the closed form is 0/0 at alpha = {alpha}, beta = {beta}; use the determinant instead")]
    DegenerateNormalization { alpha: f64, beta: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A named example with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ExampleSpec {
    /// One internal edge and two leads at a junction; Robin end `u(l) + c u'(l) = 0`
    /// and the junction coupling `U0` conjugated by the lead mixer of [`es_mixer`].
    EsTwoLeads {
        psi: f64,
        c: f64,
        r: f64,
        phi1: f64,
        phi2: f64,
        phi3: f64,
        length: Rational64,
    },
    /// A loop of length `l` and two leads with the two-parameter coupling.
    LoopTwoLeads {
        alpha: f64,
        beta: f64,
        length: Rational64,
    },
    /// Regular `n`-gon with two leads at every vertex and Kirchhoff couplings.
    Polygon { n: usize, side: Rational64 },
    /// One edge of weight `c` with two leads of weights `c1`, `c2` and a Dirichlet far end.
    WeightedOneEdge {
        c: f64,
        c1: f64,
        c2: f64,
        length: Rational64,
    },
    /// [`ExampleSpec::EsTwoLeads`] with `psi = pi`, `c = 0`: no resonances at all.
    SolomyakFamily {
        r: f64,
        phi1: f64,
        phi2: f64,
        phi3: f64,
        length: Rational64,
    },
}

pub const EXAMPLE_NAMES: [&str; 5] = [
    "es-two-leads",
    "loop-two-leads",
    "polygon",
    "weighted-one-edge",
    "solomyak-family",
];

impl ExampleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleSpec::EsTwoLeads { .. } => "es-two-leads",
            ExampleSpec::LoopTwoLeads { .. } => "loop-two-leads",
            ExampleSpec::Polygon { .. } => "polygon",
            ExampleSpec::WeightedOneEdge { .. } => "weighted-one-edge",
            ExampleSpec::SolomyakFamily { .. } => "solomyak-family",
        }
    }

    /// The example with default parameters.
    pub fn default_for(name: &str) -> Result<ExampleSpec, GalleryError> {
        let one = Rational64::from_integer(1);
        Ok(match name {
            "es-two-leads" => ExampleSpec::EsTwoLeads {
                psi: -1.0,
                c: 0.5,
                r: 1.0,
                phi1: 0.0,
                phi2: 0.0,
                phi3: 0.0,
                length: one,
            },
            "loop-two-leads" => ExampleSpec::LoopTwoLeads {
                alpha: 1.0,
                beta: 1.0,
                length: one,
            },
            "polygon" => ExampleSpec::Polygon { n: 3, side: one },
            "weighted-one-edge" => ExampleSpec::WeightedOneEdge {
                c: 2.0,
                c1: 1.0,
                c2: 1.0,
                length: one,
            },
            "solomyak-family" => ExampleSpec::SolomyakFamily {
                r: std::f64::consts::FRAC_1_SQRT_2,
                phi1: 0.0,
                phi2: 0.0,
                phi3: 0.0,
                length: one,
            },
            other => {
                return Err(GalleryError::InvalidExample(format!(
                    "unknown example `{other}` (known: {})",
                    EXAMPLE_NAMES.join(", ")
                )))
            }
        })
    }

    /// `(key, value)` pairs in the form accepted by [`ExampleSpec::from_str`].
    pub fn parameters(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format!("{x:?}");
        match self {
            ExampleSpec::EsTwoLeads {
                psi,
                c,
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => vec![
                ("psi", f(*psi)),
                ("c", f(*c)),
                ("r", f(*r)),
                ("phi1", f(*phi1)),
                ("phi2", f(*phi2)),
                ("phi3", f(*phi3)),
                ("l", length.to_string()),
            ],
            ExampleSpec::LoopTwoLeads { alpha, beta, length } => vec![
                ("alpha", f(*alpha)),
                ("beta", f(*beta)),
                ("l", length.to_string()),
            ],
            ExampleSpec::Polygon { n, side } => vec![("n", n.to_string()), ("l", side.to_string())],
            ExampleSpec::WeightedOneEdge { c, c1, c2, length } => vec![
                ("c", f(*c)),
                ("c1", f(*c1)),
                ("c2", f(*c2)),
                ("l", length.to_string()),
            ],
            ExampleSpec::SolomyakFamily {
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => vec![
                ("r", f(*r)),
                ("phi1", f(*phi1)),
                ("phi2", f(*phi2)),
                ("phi3", f(*phi3)),
                ("l", length.to_string()),
            ],
        }
    }

    /// Copy with one real-valued parameter replaced, validated.
    pub fn with_real(&self, key: &str, value: f64) -> Result<ExampleSpec, GalleryError> {
        let mut out = self.clone();
        out.set(key, &format!("{value:?}"))?;
        out.validate()?;
        Ok(out)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), GalleryError> {
        let real = || -> Result<f64, GalleryError> {
            parse_real(value).ok_or_else(|| {
                GalleryError::InvalidExample(format!("`{key}={value}`: expected a real number"))
            })
        };
        let rational = || -> Result<Rational64, GalleryError> {
            Rational64::from_str(value.trim()).map_err(|_| {
                GalleryError::InvalidExample(format!("`{key}={value}`: expected an integer or p/q"))
            })
        };
        let name = self.name();
        let unknown = || GalleryError::InvalidExample(format!("`{name}` has no parameter `{key}`"));
        match self {
            ExampleSpec::EsTwoLeads {
                psi,
                c,
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => match key {
                "psi" => *psi = real()?,
                "c" => *c = real()?,
                "r" => *r = real()?,
                "phi1" => *phi1 = real()?,
                "phi2" => *phi2 = real()?,
                "phi3" => *phi3 = real()?,
                "l" => *length = rational()?,
                _ => return Err(unknown()),
            },
            ExampleSpec::LoopTwoLeads { alpha, beta, length } => match key {
                "alpha" => *alpha = real()?,
                "beta" => *beta = real()?,
                "l" => *length = rational()?,
                _ => return Err(unknown()),
            },
            ExampleSpec::Polygon { n, side } => match key {
                "n" => {
                    *n = value.trim().parse().map_err(|_| {
                        GalleryError::InvalidExample(format!("`n={value}`: expected an integer"))
                    })?
                }
                "l" => *side = rational()?,
                _ => return Err(unknown()),
            },
            ExampleSpec::WeightedOneEdge { c, c1, c2, length } => match key {
                "c" => *c = real()?,
                "c1" => *c1 = real()?,
                "c2" => *c2 = real()?,
                "l" => *length = rational()?,
                _ => return Err(unknown()),
            },
            ExampleSpec::SolomyakFamily {
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => match key {
                "r" => *r = real()?,
                "phi1" => *phi1 = real()?,
                "phi2" => *phi2 = real()?,
                "phi3" => *phi3 = real()?,
                "l" => *length = rational()?,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<(), GalleryError> {
        let bad = |msg: String| Err(GalleryError::InvalidExample(msg));
        let positive_len = |l: &Rational64| {
            if l.is_positive() {
                Ok(())
            } else {
                Err(GalleryError::InvalidExample(format!("length {l} must be positive")))
            }
        };
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            ExampleSpec::EsTwoLeads {
                psi,
                c,
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => {
                if !finite(&[*psi, *c, *r, *phi1, *phi2, *phi3]) {
                    return bad("parameters must be finite".into());
                }
                if !(0.0..=1.0).contains(r) {
                    return bad(format!("r = {r} must lie in [0, 1]"));
                }
                positive_len(length)
            }
            ExampleSpec::SolomyakFamily {
                r,
                phi1,
                phi2,
                phi3,
                length,
            } => {
                if !finite(&[*r, *phi1, *phi2, *phi3]) {
                    return bad("parameters must be finite".into());
                }
                if !(0.0..=1.0).contains(r) {
                    return bad(format!("r = {r} must lie in [0, 1]"));
                }
                positive_len(length)
            }
            ExampleSpec::LoopTwoLeads { alpha, beta, length } => {
                if !finite(&[*alpha, *beta]) {
                    return bad("parameters must be finite".into());
                }
                positive_len(length)
            }
            ExampleSpec::Polygon { n, side } => {
                if *n < 3 {
                    return bad(format!("polygon needs n >= 3, got {n}"));
                }
                positive_len(side)
            }
            ExampleSpec::WeightedOneEdge { c, c1, c2, length } => {
                if ![*c, *c1, *c2].iter().all(|w| w.is_finite() && *w > 0.0) {
                    return bad("weights must be positive".into());
                }
                positive_len(length)
            }
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v = match body {
        "pi" => PI,
        _ => match body.strip_suffix("pi") {
            Some(m) => m.trim_end_matches('*').parse::<f64>().ok()? * PI,
            None => match body.split_once("pi/") {
                Some(("", d)) => PI / d.parse::<f64>().ok()?,
                _ => body.parse::<f64>().ok()?,
            },
        },
    };
    v.is_finite().then_some(if neg { -v } else { v })
}

impl FromStr for ExampleSpec {
    type Err = GalleryError;

    /// `name` or `name:key=value,key=value`; unspecified keys keep their defaults.
    /// Reals also accept `pi`, `2pi`, `pi/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r),
            None => (s.trim(), ""),
        };
        let mut spec = ExampleSpec::default_for(name)?;
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                GalleryError::InvalidExample(format!("`{item}` is not of the form key=value"))
            })?;
            spec.set(k.trim(), v)?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self
            .parameters()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, "{}:{}", self.name(), params.join(","))
    }
}

/// The 2x2 lead block of the mixer `W = diag(1, W4)`.
pub fn es_mixer(r: f64, phi1: f64, phi2: f64, phi3: f64) -> CMatrix {
    let s = (1.0 - r * r).max(0.0).sqrt();
    let e = |t: f64| Complex64::from_polar(1.0, t);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            e(phi1) * r,
            e(phi2) * s,
            e(phi3) * s,
            -e(phi2 + phi3 - phi1) * r,
        ],
    )
}

/// Junction coupling `W^* U0 W` for the edge-and-two-leads example, ends
/// ordered `(edge start, first lead, second lead)`.
pub fn es_coupling(psi: f64, r: f64, phi1: f64, phi2: f64, phi3: f64) -> CMatrix {
    let u0 = CMatrix::from_row_slice(
        3,
        3,
        &[
            ZERO,
            ONE,
            ZERO,
            ONE,
            ZERO,
            ZERO,
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, psi),
        ],
    );
    let mut w = CMatrix::identity(3, 3);
    w.view_mut((1, 1), (2, 2))
        .copy_from(&es_mixer(r, phi1, phi2, phi3));
    w.adjoint() * u0 * w
}

/// Linear conditions `A psi + B psi' = 0` of the loop coupling, ends ordered
/// `(loop start, loop end, first lead, second lead)` with outward derivatives.
/// At `alpha = 0, beta = +-1` the limiting conditions are used.
pub fn loop_conditions(alpha: f64, beta: f64) -> (CMatrix, CMatrix) {
    let mut a = CMatrix::zeros(4, 4);
    let mut b = CMatrix::zeros(4, 4);
    let c = |x: f64| Complex64::new(x, 0.0);
    a[(0, 0)] = ONE;
    a[(0, 2)] = -ONE;
    a[(1, 1)] = ONE;
    a[(1, 3)] = -ONE;
    if alpha == 0.0 && (beta.abs() - 1.0).abs() < 1e-14 {
        let beta = beta.signum();
        a[(2, 0)] = ONE;
        a[(2, 1)] = c(-beta);
        for (j, x) in [1.0, beta, 1.0, beta].into_iter().enumerate() {
            b[(3, j)] = c(x);
        }
    } else {
        a[(2, 0)] = c(alpha);
        a[(3, 1)] = c(alpha);
        for (j, x) in [1.0, beta, 1.0, beta].into_iter().enumerate() {
            b[(2, j)] = c(-x);
        }
        for (j, x) in [beta, 1.0, beta, 1.0].into_iter().enumerate() {
            b[(3, j)] = c(-x);
        }
    }
    (a, b)
}

/// Builds the graph of an example.
pub fn make_example(spec: &ExampleSpec) -> Result<MetricGraph, GalleryError> {
    spec.validate()?;
    let graph = match spec {
        ExampleSpec::EsTwoLeads {
            psi,
            c,
            r,
            phi1,
            phi2,
            phi3,
            length,
        } => es_graph(spec.to_string(), *psi, *c, *r, *phi1, *phi2, *phi3, *length)?,
        ExampleSpec::SolomyakFamily {
            r,
            phi1,
            phi2,
            phi3,
            length,
        } => es_graph(spec.to_string(), PI, 0.0, *r, *phi1, *phi2, *phi3, *length)?,
        ExampleSpec::LoopTwoLeads { alpha, beta, length } => {
            let (a, b) = loop_conditions(*alpha, *beta);
            let coupling = unitary_from_linear_conditions(&a, &b)?;
            MetricGraph::builder(spec.to_string())
                .vertex("v")
                .edge("e", "v", "v", *length)
                .lead("f1", "v")
                .lead("f2", "v")
                .couple_ordered(
                    "v",
                    CouplingSpec::Assignment(coupling),
                    vec![
                        EndRef::edge("e", End::A),
                        EndRef::edge("e", End::B),
                        EndRef::lead("f1"),
                        EndRef::lead("f2"),
                    ],
                )
                .build()?
        }
        ExampleSpec::Polygon { n, side } => {
            let mut b = MetricGraph::builder(spec.to_string());
            for j in 0..*n {
                b = b.vertex(format!("v{j}"));
            }
            for j in 0..*n {
                b = b.edge(format!("e{j}"), format!("v{j}"), format!("v{}", (j + 1) % n), *side);
            }
            for j in 0..*n {
                b = b
                    .lead(format!("f{j}_1"), format!("v{j}"))
                    .lead(format!("f{j}_2"), format!("v{j}"));
            }
            for j in 0..*n {
                b = b.couple(format!("v{j}"), CouplingSpec::Kirchhoff);
            }
            b.build()?
        }
        ExampleSpec::WeightedOneEdge { c, c1, c2, length } => MetricGraph::builder(spec.to_string())
            .vertex("v")
            .vertex("w")
            .edge_weighted("e", "v", "w", *length, *c)
            .lead_weighted("f1", "v", *c1)
            .lead_weighted("f2", "v", *c2)
            .couple("v", CouplingSpec::WeightedKirchhoff)
            .couple("w", CouplingSpec::Robin(0.0))
            .build()?,
    };
    Ok(graph)
}

#[allow(clippy::too_many_arguments)]
fn es_graph(
    name: String,
    psi: f64,
    c: f64,
    r: f64,
    phi1: f64,
    phi2: f64,
    phi3: f64,
    length: Rational64,
) -> Result<MetricGraph, GalleryError> {
    let u = es_coupling(psi, r, phi1, phi2, phi3);
    // u(l) + c u'(l) = 0 with the outward derivative -u'(l)
    Ok(MetricGraph::builder(name)
        .vertex("v")
        .vertex("w")
        .edge("e", "v", "w", length)
        .lead("f1", "v")
        .lead("f2", "v")
        .couple_ordered(
            "v",
            CouplingSpec::Unitary(u),
            vec![EndRef::edge("e", End::A), EndRef::lead("f1"), EndRef::lead("f2")],
        )
        .couple("w", CouplingSpec::Robin(-c))
        .build()?)
}

/// Closed-form resonance condition of the loop with two leads.
pub fn oracle_loop_condition(
    alpha: f64,
    beta: f64,
    length: f64,
    k: Complex64,
) -> Result<Complex64, GalleryError> {
    let i = Complex64::new(0.0, 1.0);
    let denom = Complex64::new(4.0 * (beta * beta - 1.0) + alpha * alpha, -4.0 * alpha);
    if denom.norm() <= 1e-12 {
        return Err(GalleryError::DegenerateNormalization { alpha, beta });
    }
    let kl = k * length;
    let (s, c) = (kl.sin(), kl.cos());
    let num = -alpha * alpha * s + 2.0 * k * alpha * (beta + i * s - c)
        - 2.0 * k * k * (s + i * c) * (beta * beta - 1.0);
    Ok(16.0 * num / denom)
}

/// Resonances of the polygon with two leads per vertex from the rotation
/// channels `omega^n = 1`, `omega^2 != -1`: `exp(-i k l) = cos(theta)`.
/// Coincident zeros of different channels are merged with summed multiplicity.
pub fn oracle_polygon_resonances(n: usize, side: Rational64, region: &Rect) -> Vec<ZeroRecord> {
    let l = side.to_f64().unwrap_or(f64::NAN);
    let mut out: Vec<ZeroRecord> = Vec::new();
    if n < 3 || !(l > 0.0) {
        return out;
    }
    for j in 0..n {
        // omega^2 = -1 exactly when 4j = n (mod 2n)
        if (4 * j) % (2 * n) == n % (2 * n) {
            continue;
        }
        let theta = TAU * j as f64 / n as f64;
        let log_cos = Complex64::new(theta.cos(), 0.0).ln();
        let base = Complex64::new(0.0, 1.0) * log_cos / l;
        if base.im < region.im_min || base.im > region.im_max {
            continue;
        }
        let step = TAU / l;
        let m_lo = ((region.re_min - base.re) / step).ceil() as i64;
        let m_hi = ((region.re_max - base.re) / step).floor() as i64;
        for m in m_lo..=m_hi {
            let k = base + step * m as f64;
            if !region.contains(k) {
                continue;
            }
            match out.iter_mut().find(|z| (z.k - k).norm() < 1e-9 * (1.0 + k.norm())) {
                Some(z) => z.multiplicity += 1,
                None => out.push(ZeroRecord {
                    k,
                    multiplicity: 1,
                    residual: 0.0,
                    radius: 0.0,
                    status: ZeroStatus::Converged,
                }),
            }
        }
    }
    out.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    out
}

/// Effective size from the polygon theorem: `n l / 2`, or `(n - 2) l / 2` when `4 | n`.
pub fn polygon_effective_size(n: usize, side: Rational64) -> Rational64 {
    let m = if n % 4 == 0 { n - 2 } else { n };
    side * Rational64::new(m as i64, 2)
}

/// A representative list covering every example family.
pub fn catalog() -> Vec<ExampleSpec> {
    let one = Rational64::from_integer(1);
    let mut out = vec![
        ExampleSpec::default_for("es-two-leads").unwrap(),
        ExampleSpec::EsTwoLeads {
            psi: 0.7,
            c: -0.3,
            r: 0.6,
            phi1: 0.4,
            phi2: -1.1,
            phi3: 2.0,
            length: Rational64::new(3, 2),
        },
        ExampleSpec::default_for("solomyak-family").unwrap(),
    ];
    for alpha in [0.0, 0.5, 1.0] {
        for beta in [0.0, 0.5, 1.0, -1.0, 2.0] {
            out.push(ExampleSpec::LoopTwoLeads {
                alpha,
                beta,
                length: one,
            });
        }
    }
    for n in 3..=6 {
        out.push(ExampleSpec::Polygon { n, side: one });
    }
    for c in [1.5, 2.0, 3.0] {
        out.push(ExampleSpec::WeightedOneEdge {
            c,
            c1: 1.0,
            c2: 1.0,
            length: one,
        });
    }
    out
}
