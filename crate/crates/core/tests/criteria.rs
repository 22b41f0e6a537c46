mod common;

use common::{c, r, rng};
use num_complex::Complex64;
use rand::Rng;

use qgr::criteria::{
    classify_symmetric_vertex, effective_coupling, extreme_coefficient,
    extreme_coefficient_vanishes, symmetric_effective_coupling, symmetric_inverse,
    vertex_nonweyl_test, weighted_balance_for_vertex, weighted_balance_test, Branch,
    CriterionConfig, ExtremeSign, Method,
};
use qgr::gallery::{make_example, ExampleSpec};
use qgr::graph::{
    coupling_delta, coupling_kirchhoff, flatten, scale_to_unweighted, CouplingSpec, MetricGraph,
};
use qgr::linalg::{identity, max_abs_diff, ones, CMatrix};

fn loop_model(alpha: f64, beta: f64) -> qgr::graph::OneVertexModel {
    let spec: ExampleSpec = format!("loop-two-leads:alpha={alpha},beta={beta}").parse().unwrap();
    flatten(&make_example(&spec).unwrap()).unwrap()
}

#[test]
fn effective_coupling_examples() {
    let u = coupling_kirchhoff(2).unwrap().matrix;
    let eff = effective_coupling(&u, 1, 1).unwrap();
    for k in [c(0.3, 0.1), c(2.0, -1.0), c(-0.7, 2.5)] {
        let v = eff.eval(k).unwrap();
        assert!((v[(0, 0)] - Branch::MinusOverPlus.value(k)).norm() < 1e-12);
    }

    let u = coupling_delta(4, 1.0).unwrap().matrix;
    let k = c(0.5, 0.3);
    let generic = effective_coupling(&u, 2, 2).unwrap().eval(k).unwrap();
    let a = 2.0 / c(4.0, 1.0);
    let closed = symmetric_effective_coupling(a, c(-1.0, 0.0), 2, 2, k).unwrap();
    assert!(max_abs_diff(&generic, &closed) < 1e-10);
}

#[test]
fn symmetric_closed_form_examples() {
    let v = symmetric_effective_coupling(c(1.0, 0.0), c(-1.0, 0.0), 1, 1, c(2.0, 0.0)).unwrap();
    assert!((v[(0, 0)] - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    assert!(symmetric_effective_coupling(c(0.5, 0.0), c(-1.0, 0.0), 4, 0, c(1.0, 0.5)).is_err());
}

#[test]
fn vertex_test_examples() {
    let kir = vertex_nonweyl_test(&coupling_kirchhoff(4).unwrap().matrix, 2, 2).unwrap();
    assert!(kir.non_weyl);
    assert_eq!(kir.branch, Some(Branch::MinusOverPlus));
    assert_eq!(kir.method, Method::SampledEigenvalue);

    let delta = vertex_nonweyl_test(&coupling_delta(4, 1.0).unwrap().matrix, 2, 2).unwrap();
    assert!(!delta.non_weyl);
    assert_eq!(delta.branch, None);

    let unbalanced = vertex_nonweyl_test(&coupling_kirchhoff(3).unwrap().matrix, 1, 2).unwrap();
    assert!(!unbalanced.non_weyl);
}

#[test]
fn classify_symmetric_examples() {
    assert!(classify_symmetric_vertex(c(1.0 / 3.0, 0.0), c(-1.0, 0.0), 3, 3).non_weyl);
    assert!(classify_symmetric_vertex(c(-0.5, 0.0), c(1.0, 0.0), 2, 2).non_weyl);
    assert!(!classify_symmetric_vertex(2.0 / c(4.0, 0.5), c(-1.0, 0.0), 2, 2).non_weyl);
}

#[test]
fn weighted_balance_examples() {
    assert!(weighted_balance_test(&[2.0], &[1.0, 1.0]).unwrap().non_weyl);
    assert!(!weighted_balance_test(&[1.0], &[1.0, 1.0]).unwrap().non_weyl);
    assert!(weighted_balance_test(&[1.0; 3], &[1.0; 3]).unwrap().non_weyl);
    assert!(weighted_balance_test(&[0.0], &[1.0]).is_err());
}

#[test]
fn extreme_coefficient_examples() {
    let cfg = CriterionConfig::default();
    for beta in [0.0, 0.5, 2.0] {
        assert!(extreme_coefficient_vanishes(&loop_model(0.0, beta), ExtremeSign::Plus, &cfg).unwrap());
    }
    let m = loop_model(2.0, 1.0);
    assert!(!extreme_coefficient_vanishes(&m, ExtremeSign::Plus, &cfg).unwrap());
    let mut rng = rng(17);
    for _ in 0..8 {
        let k = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        assert!(extreme_coefficient(&m, ExtremeSign::Plus, k).unwrap().norm() > 1e-6);
    }
}

#[test]
fn cross_formula_agreement() {
    let mut rng = rng(2024);
    let mut checked = 0;
    while checked < 100 {
        let p = rng.gen_range(1..4);
        let q = rng.gen_range(1..4);
        let d = (p + q) as f64;
        let b = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let a = (Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)) - b) / d;
        let k = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let u = ones(p + q) * a + identity(p + q) * b;
        let generic = effective_coupling(&u, p, q).unwrap().eval(k);
        let closed = symmetric_effective_coupling(a, b, p, q, k);
        if let (Ok(x), Ok(y)) = (generic, closed) {
            let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
            assert!(max_abs_diff(&x, &y) < 1e-10 * scale, "a={a} b={b} p={p} q={q} k={k}");
            checked += 1;
        }
    }
}

#[test]
fn eigenvalues_of_symmetric_matrix() {
    let mut rng = rng(99);
    for n in 1..7 {
        let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = Complex64::from_polar(1.0, rng.gen_range(0.0..6.0));
        let m = ones(n) * a + identity(n) * b;
        // characteristic polynomial check: det(M - lambda I) vanishes at the claimed eigenvalues
        let top = a * n as f64 + b;
        let shifted = &m - identity(n) * top;
        assert!(shifted.determinant().norm() < 1e-10);
        if n > 1 {
            let rank_one = &m - identity(n) * b;
            assert!(max_abs_diff(&rank_one, &(ones(n) * a)) < 1e-15);
            let tr: Complex64 = (0..n).map(|i| m[(i, i)]).sum();
            assert!((tr - (top + b * (n - 1) as f64)).norm() < 1e-10);
        }
        let inv = symmetric_inverse(a, b, n);
        assert!(max_abs_diff(&(&m * inv), &identity(n)) < 1e-10);
    }
}

fn weighted_star(internal: &[f64], external: &[f64]) -> MetricGraph {
    let mut b = MetricGraph::builder("wstar").vertex("o");
    for (j, w) in internal.iter().enumerate() {
        b = b
            .vertex(format!("t{j}"))
            .edge_weighted(format!("e{j}"), "o", format!("t{j}"), r(1, 1), *w)
            .couple(format!("t{j}"), CouplingSpec::WeightedKirchhoff);
    }
    for (j, w) in external.iter().enumerate() {
        b = b.lead_weighted(format!("f{j}"), "o", *w);
    }
    b.couple("o", CouplingSpec::WeightedKirchhoff).build().unwrap()
}

#[test]
fn balance_matches_rescaled_eigenvalue_test() {
    let mut rng = rng(31);
    let mut balanced = 0;
    for n in 0..50 {
        let p = rng.gen_range(1..4);
        let q = rng.gen_range(1..4);
        let internal: Vec<f64> = (0..p).map(|_| rng.gen_range(0.25..3.0)).collect();
        let mut external: Vec<f64> = (0..q).map(|_| rng.gen_range(0.25..3.0)).collect();
        if n % 2 == 0 {
            let si: f64 = internal.iter().sum();
            let se: f64 = external.iter().sum();
            external.iter_mut().for_each(|w| *w *= si / se);
        }
        let g = weighted_star(&internal, &external);
        let by_weights = weighted_balance_for_vertex(&g, "o").unwrap();
        let scaled = flatten(&scale_to_unweighted(&g).unwrap()).unwrap();
        let block = scaled.block_index("o").unwrap();
        let (u, pp, qq) = scaled.vertex_partition(block);
        let by_eigen = vertex_nonweyl_test(&u, pp, qq).unwrap();
        assert_eq!(by_weights.non_weyl, by_eigen.non_weyl, "{internal:?} / {external:?}");
        balanced += by_weights.non_weyl as usize;
    }
    assert!(balanced >= 25);
}

#[test]
fn non_kirchhoff_vertex_refused_by_balance_test() {
    let g = MetricGraph::builder("plain")
        .vertex("v")
        .edge("e", "v", "v", r(1, 1))
        .couple("v", CouplingSpec::Kirchhoff)
        .build()
        .unwrap();
    assert!(weighted_balance_for_vertex(&g, "v").is_err());
}

#[test]
fn partition_of_mixed_block() {
    let u = CMatrix::identity(3, 3);
    assert!(effective_coupling(&u, 2, 2).is_err());
}
