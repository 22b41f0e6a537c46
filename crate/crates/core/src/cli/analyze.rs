use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::commands::{count_table, evaluator_for};
use super::{sci, CliError, GraphInput};
use crate::criteria::{
    vertex_nonweyl_test_with, weighted_balance_for_vertex, CriterionConfig, VertexClassification,
};
use crate::exppoly::{secular_exppoly_with, ExpPolyError, SymbolicConfig};
use crate::graph::{flatten, scale_to_unweighted, CouplingKind, EdgeLength, MetricGraph, OneVertexModel};
use crate::zeros::{locate_zeros, EvalMode, Rect, ZerosConfig};

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub cap: usize,
    /// `(rmax, samples)` of the numeric route.
    pub numeric: Option<(f64, usize)>,
    /// Region and tolerance of the zero list.
    pub zeros: Option<(Rect, f64)>,
    pub mode: EvalMode,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            cap: crate::exppoly::DEFAULT_SYMBOLIC_CAP,
            numeric: None,
            zeros: None,
            mode: EvalMode::Auto,
            seed: crate::criteria::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub name: String,
    pub internal_edges: usize,
    pub leads: usize,
    pub vertices: usize,
    /// Sum of internal lengths.
    pub size: String,
    /// Sum of `l / c` over internal edges.
    pub weighted_size: f64,
    pub weighted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexReport {
    pub vertex: String,
    pub coupling: String,
    pub internal_ends: usize,
    pub leads: usize,
    pub non_weyl: bool,
    pub branch: Option<String>,
    pub method: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicReport {
    pub effective_size: String,
    pub effective_size_value: f64,
    pub sigma_min: String,
    pub sigma_max: String,
    pub terms: usize,
    /// Power of k common to all coefficients.
    pub k_power: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericReport {
    pub radii: Vec<f64>,
    pub counts: Vec<Option<usize>>,
    pub slope: f64,
    pub w_est: f64,
    pub half_width: f64,
    pub partial: bool,
    pub evaluator: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRow {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
    pub status: String,
}

/// Verdict of one route: `Some(true)` for non-Weyl.
#[derive(Clone, Debug, Serialize)]
pub struct RouteVerdict {
    pub route: String,
    pub non_weyl: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub source: String,
    pub graph: GraphSummary,
    /// Size W is compared with: the size of the (rescaled) model.
    pub comparison_size: String,
    pub comparison_size_value: f64,
    pub vertices: Vec<VertexReport>,
    pub symbolic: Option<SymbolicReport>,
    pub numeric: Option<NumericReport>,
    pub routes: Vec<RouteVerdict>,
    /// `Weyl`, `non-Weyl`, `undetermined` or `routes disagree`.
    pub verdict: String,
    pub verdict_line: String,
    pub disagreements: Vec<String>,
    pub notes: Vec<String>,
    pub zeros: Option<Vec<ZeroRow>>,
    /// True when the secular function vanishes identically.
    pub degenerate: bool,
    pub config: Vec<(String, String)>,
}

fn size_string(s: EdgeLength) -> String {
    s.to_string()
}

fn kind_name(kind: &CouplingKind) -> String {
    match kind {
        CouplingKind::Kirchhoff => "kirchhoff".into(),
        CouplingKind::AntiKirchhoff => "antikirchhoff".into(),
        CouplingKind::Delta { alpha } => format!("delta {alpha}"),
        CouplingKind::DeltaPrime { beta } => format!("deltaprime {beta}"),
        CouplingKind::Robin { c } => format!("robin {c}"),
        CouplingKind::Symmetric { a, b } => format!("symmetric a={a} b={b}"),
        CouplingKind::General => "general".into(),
        CouplingKind::WeightedKirchhoff => "weightedkirchhoff".into(),
    }
}

fn vertex_report(graph: &MetricGraph, c: &VertexClassification) -> VertexReport {
    let (p, q) = graph.vertex_balance(&c.vertex);
    VertexReport {
        vertex: c.vertex.clone(),
        coupling: graph
            .coupling(&c.vertex)
            .map(|a| kind_name(&a.kind))
            .unwrap_or_default(),
        internal_ends: p,
        leads: q,
        non_weyl: c.non_weyl,
        branch: c.branch.map(|b| b.to_string()),
        method: c.method.to_string(),
        residual: c.residual,
    }
}

/// The unweighted model the symbolic and criterion routes work on.
fn working_model(graph: &MetricGraph) -> Result<OneVertexModel, CliError> {
    if graph.is_weighted() {
        Ok(flatten(&scale_to_unweighted(graph)?)?)
    } else {
        Ok(flatten(graph)?)
    }
}

/// Runs every applicable route and assembles the report. Never fails on a
/// route that cannot run; that route is skipped with a note.
pub fn analyze_graph(input: &GraphInput, opts: &AnalyzeOptions) -> Result<ReportDocument, CliError> {
    let graph = &input.graph;
    let mut notes = Vec::new();
    let mut disagreements = Vec::new();
    let model = match working_model(graph) {
        Ok(m) => Some(m),
        Err(e) => {
            notes.push(format!("no unweighted model: {e}"));
            None
        }
    };
    let (comparison_size, comparison_value) = match &model {
        Some(m) => (size_string(m.size()), m.size().value()),
        None => {
            let w = graph.weighted_size();
            (format!("{w:?}"), w)
        }
    };

    // per-vertex criterion
    let config = CriterionConfig {
        seed: opts.seed,
        ..CriterionConfig::default()
    };
    let mut vertices = Vec::new();
    let mut criterion_failed = false;
    for v in graph.vertices() {
        let is_weighted_kirchhoff = graph
            .coupling(v)
            .is_some_and(|c| c.kind == CouplingKind::WeightedKirchhoff);
        let eigen = model.as_ref().and_then(|m| m.block_index(v)).map(|b| {
            let m = model.as_ref().unwrap();
            let (u, p, q) = m.vertex_partition(b);
            vertex_nonweyl_test_with(&u, p, q, &config).map(|mut c| {
                c.vertex = v.clone();
                c
            })
        });
        let chosen = if is_weighted_kirchhoff {
            let balance = weighted_balance_for_vertex(graph, v)?;
            if let Some(Ok(e)) = &eigen {
                if e.non_weyl != balance.non_weyl {
                    disagreements.push(format!(
                        "vertex {v}: weighted balance test says {}, eigenvalue test on the rescaled coupling says {}",
                        class(balance.non_weyl),
                        class(e.non_weyl)
                    ));
                }
            }
            Some(balance)
        } else {
            match eigen {
                Some(Ok(c)) => Some(c),
                Some(Err(e)) => {
                    notes.push(format!("vertex {v}: criterion failed: {e}"));
                    criterion_failed = true;
                    None
                }
                None => {
                    criterion_failed = true;
                    None
                }
            }
        };
        if let Some(c) = chosen {
            vertices.push(vertex_report(graph, &c));
        }
    }
    let mut routes = Vec::new();
    let any_non_weyl = vertices.iter().any(|v| v.non_weyl);
    routes.push(RouteVerdict {
        route: "vertex-criterion".into(),
        non_weyl: if criterion_failed && !any_non_weyl {
            None
        } else {
            Some(any_non_weyl)
        },
        detail: match vertices.iter().filter(|v| v.non_weyl).map(|v| v.vertex.as_str()).collect::<Vec<_>>() {
            nw if nw.is_empty() => "no vertex satisfies the non-Weyl condition".into(),
            nw => format!("non-Weyl vertices: {}", nw.join(", ")),
        },
    });

    // symbolic route
    let mut symbolic = None;
    let mut degenerate = false;
    let mut exact_w: Option<Rational64> = None;
    if let Some(m) = &model {
        let size = 2 * m.n_internal() + m.n_leads();
        let cfg = SymbolicConfig {
            cap: opts.cap,
            ..SymbolicConfig::default()
        };
        if size > opts.cap {
            notes.push(format!(
                "symbolic route skipped: 2N+M = {size} exceeds the cap {} (raise it with --cap)",
                opts.cap
            ));
        } else {
            match secular_exppoly_with(m, &cfg) {
                Ok(exp) => match exp.poly.effective_size() {
                    Ok(w) => {
                        let (k_power, _) = exp.poly.factor_out_k();
                        exact_w = Some(w);
                        symbolic = Some(SymbolicReport {
                            effective_size: w.to_string(),
                            effective_size_value: w.to_f64().unwrap_or(f64::NAN),
                            sigma_min: exp.poly.sigma_min().map(|s| s.to_string()).unwrap_or_default(),
                            sigma_max: exp.poly.sigma_max().map(|s| s.to_string()).unwrap_or_default(),
                            terms: exp.poly.len(),
                            k_power,
                            warnings: exp.warnings.clone(),
                        });
                    }
                    Err(_) => degenerate = true,
                },
                Err(ExpPolyError::DegenerateSecularFunction) => degenerate = true,
                Err(e) => notes.push(format!("symbolic route skipped: {e}")),
            }
        }
    }
    if degenerate {
        notes.push(
            "the secular function vanishes identically, so every k solves the resonance condition; \
             this happens when part of the graph is decoupled from the leads with a continuum of \
             solutions (check the vertex couplings, e.g. a coupling that separates an edge end \
             from every condition)"
                .into(),
        );
    }
    if let (Some(s), Some(w)) = (&symbolic, exact_w) {
        let less = match model.as_ref().map(|m| m.size()) {
            Some(EdgeLength::Exact(v)) => w < v,
            _ => s.effective_size_value < comparison_value * (1.0 - 1e-12),
        };
        routes.push(RouteVerdict {
            route: "symbolic".into(),
            non_weyl: Some(less),
            detail: format!("W = {} (exact), V = {comparison_size}", s.effective_size),
        });
    }

    // numeric route
    let mut numeric = None;
    if let Some((rmax, samples)) = opts.numeric {
        match numeric_route(graph, opts.mode, rmax, samples) {
            Ok(n) => {
                let tol = (2.0 * n.half_width).max(0.05 * comparison_value);
                let verdict = if (n.w_est - comparison_value).abs() <= tol {
                    Some(false)
                } else if n.w_est < comparison_value - tol {
                    Some(true)
                } else {
                    None
                };
                routes.push(RouteVerdict {
                    route: "numeric".into(),
                    non_weyl: verdict,
                    detail: format!(
                        "W_est = {:.6} +- {:.6} from N(R), R <= {rmax}",
                        n.w_est, n.half_width
                    ),
                });
                numeric = Some(n);
            }
            Err(e) => notes.push(format!("numeric route failed: {e}")),
        }
    }

    // zero list
    let zeros = match opts.zeros {
        Some((rect, tol)) => {
            let eval = evaluator_for(graph, opts.mode)?;
            let z = locate_zeros(&eval, &rect, tol, &ZerosConfig::default())?;
            Some(
                z.into_iter()
                    .map(|r| ZeroRow {
                        re: r.k.re,
                        im: r.k.im,
                        multiplicity: r.multiplicity,
                        residual: r.residual,
                        status: r.status.to_string(),
                    })
                    .collect(),
            )
        }
        None => None,
    };

    // verdict
    let decided: Vec<&RouteVerdict> = routes.iter().filter(|r| r.non_weyl.is_some()).collect();
    for (i, a) in decided.iter().enumerate() {
        for b in &decided[i + 1..] {
            if a.non_weyl != b.non_weyl {
                disagreements.push(format!(
                    "{} route says {} ({}); {} route says {} ({})",
                    a.route,
                    class(a.non_weyl.unwrap()),
                    a.detail,
                    b.route,
                    class(b.non_weyl.unwrap()),
                    b.detail
                ));
            }
        }
    }
    let names: Vec<&str> = decided.iter().map(|r| r.route.as_str()).collect();
    let verdict = if decided.is_empty() {
        "undetermined".to_string()
    } else if !disagreements.is_empty() {
        "routes disagree".to_string()
    } else {
        class(decided[0].non_weyl.unwrap()).to_string()
    };
    let w_part = match (&symbolic, &numeric) {
        (Some(s), _) => format!("W = {}", s.effective_size),
        (None, Some(n)) => format!("W_est = {:.4} +- {:.4}", n.w_est, n.half_width),
        (None, None) => "W not computed".to_string(),
    };
    let verdict_line = if decided.is_empty() {
        format!("undetermined, {w_part}, V = {comparison_size} (no route reached a verdict)")
    } else {
        format!("{verdict}, {w_part}, V = {comparison_size} (routes: {})", names.join(", "))
    };

    let mut config_echo = vec![
        ("source".to_string(), input.source.clone()),
        ("cap".to_string(), opts.cap.to_string()),
        ("mode".to_string(), format!("{:?}", opts.mode).to_lowercase()),
        ("seed".to_string(), opts.seed.to_string()),
    ];
    if let Some((rmax, samples)) = opts.numeric {
        config_echo.push(("rmax".into(), sci(rmax)));
        config_echo.push(("samples".into(), samples.to_string()));
    }
    if let Some((r, tol)) = opts.zeros {
        config_echo.push((
            "region".into(),
            format!("[{}, {}] x [{}, {}]", sci(r.re_min), sci(r.re_max), sci(r.im_min), sci(r.im_max)),
        ));
        config_echo.push(("tol".into(), sci(tol)));
    }

    Ok(ReportDocument {
        source: input.source.clone(),
        graph: GraphSummary {
            name: graph.name.clone(),
            internal_edges: graph.n_internal(),
            leads: graph.n_leads(),
            vertices: graph.vertices().len(),
            size: size_string(graph.size()),
            weighted_size: graph.weighted_size(),
            weighted: graph.is_weighted(),
        },
        comparison_size,
        comparison_size_value: comparison_value,
        vertices,
        symbolic,
        numeric,
        routes,
        verdict,
        verdict_line,
        disagreements,
        notes,
        zeros,
        degenerate,
        config: config_echo,
    })
}

fn class(non_weyl: bool) -> &'static str {
    if non_weyl {
        "non-Weyl"
    } else {
        "Weyl"
    }
}

fn numeric_route(graph: &MetricGraph, mode: EvalMode, rmax: f64, samples: usize) -> Result<NumericReport, CliError> {
    let eval = evaluator_for(graph, mode)?;
    let table = count_table(&eval, rmax, samples)?;
    Ok(NumericReport {
        radii: table.samples.iter().map(|s| s.used_radius).collect(),
        counts: table.samples.iter().map(|s| s.count).collect(),
        slope: table.slope,
        w_est: table.w_est,
        half_width: table.half_width,
        partial: table.partial,
        evaluator: eval.description().to_string(),
    })
}

impl ReportDocument {
    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let g = &self.graph;
        let _ = writeln!(s, "graph {}", g.name);
        let _ = writeln!(
            s,
            "  N = {} internal edges, M = {} leads, {} vertices",
            g.internal_edges, g.leads, g.vertices
        );
        let _ = writeln!(s, "  V = {}", g.size);
        if g.weighted {
            let _ = writeln!(s, "  weighted size = {:?} (compared with W)", g.weighted_size);
        }
        let _ = writeln!(s, "vertices");
        for v in &self.vertices {
            let _ = writeln!(
                s,
                "  {:<8} {:<22} p={} q={}  {:<9} {} [{}; residual {:.2e}]",
                v.vertex,
                v.coupling,
                v.internal_ends,
                v.leads,
                class(v.non_weyl),
                v.branch.as_deref().map(|b| format!("eigenvalue {b}")).unwrap_or_default(),
                v.method,
                v.residual
            );
        }
        if let Some(sym) = &self.symbolic {
            let _ = writeln!(s, "symbolic");
            let _ = writeln!(
                s,
                "  W = {}  (sigma in [{}, {}], {} terms, k^{} factored)",
                sym.effective_size, sym.sigma_min, sym.sigma_max, sym.terms, sym.k_power
            );
            for w in &sym.warnings {
                let _ = writeln!(s, "  warning: {w}");
            }
        }
        if let Some(n) = &self.numeric {
            let _ = writeln!(s, "numeric ({})", n.evaluator);
            for (r, c) in n.radii.iter().zip(&n.counts) {
                let c = c.map(|c| c.to_string()).unwrap_or_else(|| "unresolved".into());
                let _ = writeln!(s, "  N({r:.4}) = {c}");
            }
            let _ = writeln!(s, "  W_est = {:.6} +- {:.6}", n.w_est, n.half_width);
        }
        if let Some(zs) = &self.zeros {
            let _ = writeln!(s, "zeros ({})", zs.len());
            for z in zs {
                let _ = writeln!(
                    s,
                    "  {} {} i  m={} residual {:.2e} {}",
                    sci(z.re),
                    sci(z.im),
                    z.multiplicity,
                    z.residual,
                    z.status
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        for d in &self.disagreements {
            let _ = writeln!(s, "DISAGREEMENT: {d}");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict_line);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(example: &str) -> ReportDocument {
        let input = GraphInput::from_example(example.parse().unwrap()).unwrap();
        analyze_graph(
            &input,
            &AnalyzeOptions {
                cap: 30,
                ..AnalyzeOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn balanced_loop_report() {
        let r = report("loop-two-leads:alpha=0,beta=1");
        assert!(r.verdict_line.starts_with("non-Weyl, W = 1/2, V = 1"), "{}", r.verdict_line);
        assert!(r.verdict_line.contains("symbolic") && r.verdict_line.contains("vertex-criterion"));
        assert!(r.disagreements.is_empty());
    }

    #[test]
    fn pentagon_report() {
        let r = report("polygon:n=5");
        assert_eq!(r.verdict, "non-Weyl");
        assert_eq!(r.symbolic.as_ref().unwrap().effective_size, "5/2");
        assert_eq!(r.comparison_size, "5");
    }

    #[test]
    fn weighted_report() {
        let r = report("weighted-one-edge:c=2,c1=1,c2=1");
        assert_eq!(r.verdict, "non-Weyl");
        assert!(r.vertices.iter().any(|v| v.method == "weighted-balance" && v.non_weyl));
        let r = report("weighted-one-edge:c=2.1,c1=1,c2=1");
        assert_eq!(r.verdict, "Weyl");
    }

    #[test]
    fn report_text_names_routes() {
        let r = report("loop-two-leads:alpha=1,beta=1");
        let t = r.to_text();
        assert!(t.contains("verdict: Weyl, W = 1, V = 1 (routes:"), "{t}");
    }
}
