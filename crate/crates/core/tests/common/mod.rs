#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgr::graph::{coupling_kirchhoff, CouplingSpec, End, EndRef, MetricGraph};
use qgr::linalg::{random_unitary, CMatrix};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Relative distance `|a - b| / max(|a|, |b|)`.
pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Random point with `Re k` in `[0.3, re_max]` and `Im k` in `[im_min, im_max]`.
pub fn sample_k<R: Rng>(rng: &mut R, re_max: f64, im_min: f64, im_max: f64) -> Complex64 {
    c(rng.gen_range(0.3..re_max), rng.gen_range(im_min..im_max))
}

fn random_length<R: Rng>(rng: &mut R) -> Rational64 {
    let d = rng.gen_range(1..=3);
    r(rng.gen_range(1..=3 * d), d)
}

/// Random connected-or-not graph with `2N + M <= max_dim`, rational lengths
/// and a mix of coupling types. About half of the vertices get as many leads
/// as internal ends, so non-Weyl vertices turn up regularly.
pub fn random_graph<R: Rng>(rng: &mut R, max_dim: usize, name: &str) -> MetricGraph {
    let nv = rng.gen_range(1..=3);
    let max_edges = (max_dim / 2).clamp(1, 4);
    let n_edges = rng.gen_range(1..=max_edges);
    let mut edges = Vec::new();
    for j in 0..n_edges {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        edges.push((format!("e{j}"), a, b, random_length(rng)));
    }
    let mut degree = vec![0usize; nv];
    for (_, a, b, _) in &edges {
        degree[*a] += 1;
        degree[*b] += 1;
    }
    let mut budget = max_dim - 2 * n_edges;
    let mut leads = Vec::new();
    for v in 0..nv {
        if degree[v] == 0 {
            continue;
        }
        let want = if rng.gen_bool(0.5) {
            degree[v]
        } else {
            rng.gen_range(0..=2)
        };
        let take = want.min(budget);
        budget -= take;
        for _ in 0..take {
            leads.push((format!("f{}", leads.len()), v));
        }
    }
    let used: Vec<usize> = (0..nv).filter(|&v| degree[v] > 0).collect();
    let vname = |v: usize| format!("v{v}");
    let mut b = MetricGraph::builder(name);
    for &v in &used {
        b = b.vertex(vname(v));
    }
    for (id, a, bb, l) in &edges {
        b = b.edge(id.clone(), vname(*a), vname(*bb), *l);
    }
    for (id, v) in &leads {
        b = b.lead(id.clone(), vname(*v));
    }
    for &v in &used {
        let q = leads.iter().filter(|(_, w)| *w == v).count();
        let p = degree[v];
        let d = p + q;
        let spec = match rng.gen_range(0..4) {
            0 => CouplingSpec::Unitary(random_unitary(d, rng)),
            1 => CouplingSpec::Kirchhoff,
            2 => CouplingSpec::Delta(rng.gen_range(-2.0..2.0)),
            _ => CouplingSpec::Unitary(mixed_kirchhoff(p, q, rng)),
        };
        b = b.couple(vname(v), spec);
    }
    b.build().expect("random graph")
}

/// Kirchhoff coupling conjugated by `diag(e^{i phi} I_p, W4)` with random `phi`, `W4`.
pub fn mixed_kirchhoff<R: Rng>(p: usize, q: usize, rng: &mut R) -> CMatrix {
    let k = coupling_kirchhoff(p + q).unwrap().matrix;
    let mut w = CMatrix::zeros(p + q, p + q);
    let rot = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    for i in 0..p {
        w[(i, i)] = rot;
    }
    if q > 0 {
        w.view_mut((p, p), (q, q)).copy_from(&random_unitary(q, rng));
    }
    w.adjoint() * k * w
}

/// Star with two internal edges of length `l0` (Dirichlet far ends) and two
/// leads at the centre.
pub fn balanced_star(l0: Rational64, centre: CouplingSpec) -> MetricGraph {
    MetricGraph::builder("star")
        .vertex("o")
        .vertex("a")
        .vertex("b")
        .edge("e1", "o", "a", l0)
        .edge("e2", "o", "b", l0)
        .lead("f1", "o")
        .lead("f2", "o")
        .couple("o", centre)
        .couple("a", CouplingSpec::Robin(0.0))
        .couple("b", CouplingSpec::Robin(0.0))
        .build()
        .unwrap()
}

pub fn edge_end(id: &str, end: End) -> EndRef {
    EndRef::edge(id, end)
}
