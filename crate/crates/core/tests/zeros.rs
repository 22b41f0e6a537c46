mod common;

use std::f64::consts::{PI, TAU};

use common::{c, r, rel, rng, sample_k};
use num_complex::Complex64;
use proptest::prelude::*;

use qgr::gallery::{make_example, oracle_loop_condition, ExampleSpec};
use qgr::graph::{flatten, CouplingSpec, EdgeLength, MetricGraph, OneVertexModel};
use qgr::linalg::wrap_phase;
use qgr::zeros::{
    count_zeros, counting_function, locate_zeros, rect_winding_jittered, secular_value,
    sweep_parameter, winding_number, Contour, EvalMode, Rect, SecularEvaluator, ZeroError,
    ZerosConfig,
};

fn model(s: &str) -> OneVertexModel {
    flatten(&make_example(&s.parse::<ExampleSpec>().unwrap()).unwrap()).unwrap()
}

fn auto(s: &str) -> SecularEvaluator {
    SecularEvaluator::new(&model(s), EvalMode::Auto).unwrap()
}

fn cfg() -> ZerosConfig {
    ZerosConfig::default()
}

fn dirichlet_pi() -> OneVertexModel {
    let g = MetricGraph::builder("seg")
        .vertex("u")
        .vertex("w")
        .edge_with_length("e", "u", "w", EdgeLength::Numeric(PI), 1.0)
        .couple("u", CouplingSpec::Robin(0.0))
        .couple("w", CouplingSpec::Robin(0.0))
        .build()
        .unwrap();
    flatten(&g).unwrap()
}

#[test]
fn determinant_phase_follows_sine() {
    let m = dirichlet_pi();
    let mut rng = rng(4);
    let mut offset = None;
    for _ in 0..10 {
        let k = sample_k(&mut rng, 3.0, -1.0, 1.0);
        let (_, phase) = secular_value(&m, k).unwrap();
        let d = wrap_phase(phase - (PI * k).sin().arg());
        let o = *offset.get_or_insert(d);
        assert!(wrap_phase(d - o).abs() < 1e-8);
    }
}

#[test]
fn value_at_origin_is_finite_or_flagged() {
    for s in ["loop-two-leads", "es-two-leads", "polygon:n=3", "loop-two-leads:alpha=0,beta=1"] {
        match secular_value(&model(s), c(0.0, 0.0)) {
            Ok((log_mag, _)) => assert!(log_mag.is_finite() || log_mag == f64::NEG_INFINITY),
            Err(e) => assert!(matches!(e, ZeroError::OnZero { .. })),
        }
    }
}

#[test]
fn loop_determinant_matches_closed_form() {
    let m = model("loop-two-leads:alpha=1,beta=1");
    let mut rng = rng(8);
    let mut ratio = None;
    for _ in 0..10 {
        let k = sample_k(&mut rng, 6.0, -2.0, 2.0);
        let (lm, ph) = secular_value(&m, k).unwrap();
        let f = Complex64::from_polar(lm.exp(), ph);
        let q = f / oracle_loop_condition(1.0, 1.0, 1.0, k).unwrap();
        let r0 = *ratio.get_or_insert(q);
        assert!(rel(q, r0) < 1e-8);
    }
}

#[test]
fn dirichlet_segment_disk_count() {
    let eval = SecularEvaluator::new(&dirichlet_pi(), EvalMode::Auto).unwrap();
    let n = count_zeros(&eval, c(0.0, 0.0), 3.5, &cfg()).unwrap();
    assert_eq!(n.count, 7);
    assert!(n.integrality < 0.05);
}

#[test]
fn solomyak_family_has_no_resonances() {
    let eval = auto("solomyak-family");
    assert_eq!(count_zeros(&eval, c(0.0, 0.0), 50.0, &cfg()).unwrap().count, 0);
    let found = locate_zeros(&eval, &Rect::new(-20.0, 20.0, -10.0, 1.0), 1e-9, &cfg()).unwrap();
    assert!(found.is_empty());
}

#[test]
fn loop_disk_count_matches_frozen_oracle() {
    // winding of the closed-form condition sampled at 100001 points of |k| = 10
    const N0: usize = 7;
    let eval = auto("loop-two-leads:alpha=1,beta=1");
    assert_eq!(count_zeros(&eval, c(0.0, 0.0), 10.0, &cfg()).unwrap().count, N0);
    let stab = SecularEvaluator::new_raw(&model("loop-two-leads:alpha=1,beta=1"), EvalMode::Stabilized).unwrap();
    assert_eq!(count_zeros(&stab, c(0.0, 0.0), 10.0, &cfg()).unwrap().count, N0);
}

#[test]
fn embedded_eigenvalue_of_the_half_loop() {
    let eval = auto("loop-two-leads:alpha=0,beta=1");
    let found = locate_zeros(&eval, &Rect::new(0.0, 7.0, -1.0, 1.0), 1e-10, &cfg()).unwrap();
    assert!(found.iter().any(|z| (z.k - c(TAU, 0.0)).norm() < 1e-8), "{found:?}");
}

#[test]
fn delta_loop_zeros_solve_the_closed_form() {
    let eval = auto("loop-two-leads:alpha=1,beta=1");
    let found = locate_zeros(&eval, &Rect::new(0.5, 20.0, -6.0, 0.5), 1e-10, &cfg()).unwrap();
    assert!(found.len() >= 5);
    let i = c(0.0, 1.0);
    for z in &found {
        let cond = (i * z.k).exp() + 1.0 - 4.0 * i * z.k;
        let embedded = (z.k.re / TAU - (z.k.re / TAU).round()).abs() < 1e-9 && z.k.im.abs() < 1e-9;
        assert!(cond.norm() < 1e-6 || embedded, "{} gives {}", z.k, cond.norm());
        assert!(z.k.im <= 1e-9);
    }
}

fn radii() -> Vec<f64> {
    vec![20.0, 40.0, 60.0, 80.0]
}

#[test]
fn counting_slopes() {
    // exact stand-in for l = pi
    let half = auto("loop-two-leads:alpha=0,beta=1,l=355/113");
    let l = 355.0 / 113.0;
    for (eval, w) in [
        (half, l / 2.0),
        (auto("polygon:n=4,l=1"), 1.0),
        (auto("loop-two-leads:alpha=1,beta=1"), 1.0),
    ] {
        let t = counting_function(&eval, &radii(), &cfg()).unwrap();
        assert!(!t.partial);
        assert!((t.w_est - w).abs() <= 0.05 * w, "W_est {} vs {w}", t.w_est);
        let counts: Vec<usize> = t.samples.iter().map(|s| s.count.unwrap()).collect();
        assert!(counts.windows(2).all(|p| p[0] <= p[1]));
    }
}

#[test]
fn constant_schedule_gives_still_tracks() {
    let m = model("loop-two-leads:alpha=0.5,beta=1");
    let traj = sweep_parameter(
        "alpha",
        |_| SecularEvaluator::new(&m, EvalMode::Auto),
        &[0.5; 4],
        &Rect::new(0.5, 12.0, -6.0, 0.5),
        1e-10,
        &cfg(),
    )
    .unwrap();
    let first = traj.steps[0].zeros.len();
    assert!(first > 0);
    assert_eq!(traj.track_count, first);
    for step in &traj.steps[1..] {
        assert_eq!(step.zeros.len(), first);
        assert!(step.zeros.iter().all(|z| z.displacement < 1e-12 && !z.ambiguous));
    }
}

#[test]
fn non_monotone_schedule_rejected() {
    let m = model("loop-two-leads");
    let err = sweep_parameter(
        "alpha",
        |_| SecularEvaluator::new(&m, EvalMode::Auto),
        &[1.0, 0.5, 0.8],
        &Rect::new(0.5, 5.0, -2.0, 0.5),
        1e-8,
        &cfg(),
    );
    assert!(matches!(err, Err(ZeroError::InvalidInput(_))));
}

#[test]
fn real_couplings_give_reflection_symmetric_zeros() {
    for s in [
        "loop-two-leads:alpha=1,beta=1",
        "loop-two-leads:alpha=0.5,beta=2",
        "polygon:n=3,l=1",
        "weighted-one-edge:c=2,c1=0.5,c2=1,l=1",
    ] {
        let g = make_example(&s.parse::<ExampleSpec>().unwrap()).unwrap();
        let eval = qgr::cli::evaluator_for(&g, EvalMode::Auto).unwrap();
        let found = locate_zeros(&eval, &Rect::new(-9.3, 9.1, -5.0, 0.5), 1e-10, &cfg()).unwrap();
        for z in found.iter().filter(|z| z.k.re.abs() < 8.5 && z.k.im > -4.5) {
            let mirror = -z.k.conj();
            assert!(found.iter().any(|w| (w.k - mirror).norm() < 1e-8), "{s}: {} has no mirror", z.k);
        }
    }
}

#[test]
fn exppoly_and_determinant_phases_agree_along_a_contour() {
    let m = model("es-two-leads:psi=0.7,c=-0.3,r=0.6,phi1=0.4,phi2=-1.1,phi3=2,l=3/2");
    let sym = SecularEvaluator::new(&m, EvalMode::ExpPoly).unwrap();
    let det = SecularEvaluator::new(&m, EvalMode::Stabilized).unwrap();
    let contour = Contour::Circle { center: c(2.0, -1.0), radius: 1.7 };
    let mut offset = None;
    for j in 0..200 {
        let k = contour.point(j as f64 / 200.0);
        let d = wrap_phase(sym.value(k).phase - det.value(k).phase);
        let o = *offset.get_or_insert(d);
        assert!(wrap_phase(d - o).abs() < 1e-6, "k = {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn windings_add_over_splits(fx in 0.2f64..0.8, fy in 0.2f64..0.8, alpha in 0.3f64..2.0) {
        let eval = auto(&format!("loop-two-leads:alpha={alpha},beta=1"));
        let rect = Rect::new(0.37, 13.3, -5.1, 0.61);
        let (region, total) = rect_winding_jittered(&eval, &rect, &cfg()).unwrap();
        prop_assert!(total.integrality < 0.05);
        let mut sum = 0;
        for kid in region.split(fx, fy) {
            match winding_number(&eval, &Contour::Boundary(kid), &cfg()) {
                Ok(w) => {
                    prop_assert!(w.integrality < 0.05);
                    sum += w.count;
                }
                Err(_) => return Ok(()),
            }
        }
        prop_assert_eq!(sum, total.count);
    }

    #[test]
    fn rational_loop_lengths_scale_zeros(n in 1i64..4, d in 1i64..4) {
        // zeros of a loop of length l are those of length 1 divided by l
        let l = r(n, d);
        let lf = n as f64 / d as f64;
        let base = locate_zeros(&auto("loop-two-leads:alpha=1,beta=1"), &Rect::new(0.5, 9.0, -4.0, 0.5), 1e-11, &cfg()).unwrap();
        let scaled = auto(&format!("loop-two-leads:alpha={},beta=1,l={l}", 1.0 / lf));
        for z in base.iter().filter(|z| z.k.im < -0.01) {
            let target = z.k / lf;
            let rect = Rect::around(target, 0.05 / lf);
            let near = locate_zeros(&scaled, &rect, 1e-11, &cfg()).unwrap();
            prop_assert!(near.iter().any(|w| (w.k - target).norm() < 1e-7), "{} not found", target);
        }
    }
}
