use num_rational::Rational64;
use num_traits::ToPrimitive;

use super::{
    CouplingKind, EdgeLength, EndRef, GraphError, InternalEdge, Lead, MetricGraph,
};
use crate::linalg::{identity, max_abs_diff};

const MAX_DENOMINATOR: i64 = 1_000_000;

/// Best rational approximation of `x` with denominator at most `max_den`, if it
/// reproduces `x` to a relative error below `1e-12`.
pub fn rational_approximation(x: f64, max_den: i64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > i64::MAX as f64 / 4.0 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a as f64;
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-15 * x.abs() || frac < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let r = Rational64::new(h1, k1);
    let err = (r.to_f64()? - x).abs();
    (err < 1e-12 * x.abs().max(f64::MIN_POSITIVE)).then_some(r)
}

fn scaled_length(length: EdgeLength, weight: f64) -> EdgeLength {
    if weight == 1.0 {
        return length;
    }
    match (length, rational_approximation(weight, MAX_DENOMINATOR)) {
        (EdgeLength::Exact(l), Some(c)) => EdgeLength::Exact(l / c),
        _ => EdgeLength::Numeric(length.value() / weight),
    }
}

/// Maps a weighted graph to an unweighted one with the same resonances:
/// edge `e` of length `l` and weight `c` becomes an edge of length `l / c`.
///
/// Weighted-Kirchhoff vertices keep their (already rescaled) coupling matrix;
/// Dirichlet and Neumann ends are unchanged. Any other coupling is only
/// accepted at vertices whose incident weights are all 1.
pub fn scale_to_unweighted(graph: &MetricGraph) -> Result<MetricGraph, GraphError> {
    for (vertex, coupling) in graph.vertices().iter().zip(graph.couplings()) {
        if coupling.kind == CouplingKind::WeightedKirchhoff {
            continue;
        }
        let d = coupling.degree();
        let id = identity(d);
        let decoupled = max_abs_diff(&coupling.matrix, &id) < 1e-12
            || max_abs_diff(&coupling.matrix, &(-id)) < 1e-12;
        if decoupled {
            continue;
        }
        let all_unit = coupling
            .edge_end_order
            .iter()
            .all(|end: &EndRef| graph.end_weight(end) == Some(1.0));
        if !all_unit {
            return Err(GraphError::UnsupportedCoupling(format!(
                "vertex `{vertex}` carries a {:?} coupling on weighted ends; only weighted \
                 Kirchhoff, Dirichlet and Neumann conditions can be rescaled",
                coupling.kind
            )));
        }
    }
    let edges = graph
        .edges()
        .iter()
        .map(|e| InternalEdge {
            length: scaled_length(e.length, e.weight),
            weight: 1.0,
            ..e.clone()
        })
        .collect();
    let leads = graph
        .leads()
        .iter()
        .map(|l| Lead {
            weight: 1.0,
            ..l.clone()
        })
        .collect();
    Ok(MetricGraph::from_parts(
        format!("{} (rescaled)", graph.name),
        graph.vertices().to_vec(),
        edges,
        leads,
        graph.couplings().to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{flatten, CouplingSpec};

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rational_approximation_recovers_simple_fractions() {
        assert_eq!(rational_approximation(0.5, 1000), Some(r(1, 2)));
        assert_eq!(rational_approximation(2.0, 1000), Some(r(2, 1)));
        assert_eq!(rational_approximation(1.0 / 3.0, 1000), Some(r(1, 3)));
        assert_eq!(rational_approximation(-1.25, 1000), Some(r(-5, 4)));
        assert_eq!(rational_approximation(std::f64::consts::SQRT_2, 1_000_000), None);
    }

    fn one_edge(c: f64, c1: f64, c2: f64) -> MetricGraph {
        MetricGraph::builder("w")
            .vertex("v0")
            .vertex("v1")
            .edge_weighted("e", "v0", "v1", r(1, 1), c)
            .lead_weighted("f1", "v0", c1)
            .lead_weighted("f2", "v0", c2)
            .couple("v0", CouplingSpec::WeightedKirchhoff)
            .couple("v1", CouplingSpec::Robin(0.0))
            .build()
            .unwrap()
    }

    #[test]
    fn rational_weight_gives_exact_length() {
        let s = scale_to_unweighted(&one_edge(2.0, 1.0, 1.0)).unwrap();
        assert!(!s.is_weighted());
        assert_eq!(s.edges()[0].length, EdgeLength::Exact(r(1, 2)));
        assert!(flatten(&s).is_ok());
    }

    #[test]
    fn irrational_weight_gives_numeric_length() {
        let s = scale_to_unweighted(&one_edge(std::f64::consts::SQRT_2, 1.0, 1.0)).unwrap();
        assert!(matches!(s.edges()[0].length, EdgeLength::Numeric(_)));
        assert!((s.size().value() - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn general_coupling_on_weighted_ends_refused() {
        let g = MetricGraph::builder("w")
            .vertex("v")
            .edge_weighted("e", "v", "v", r(1, 1), 2.0)
            .couple("v", CouplingSpec::Delta(1.0))
            .build()
            .unwrap();
        assert!(matches!(
            scale_to_unweighted(&g),
            Err(GraphError::UnsupportedCoupling(_))
        ));
    }
}
