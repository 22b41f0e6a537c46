//! A weighted edge between two leads: the verdict flips when the edge weight
//! equals the sum of the lead weights.

use qgr::criteria::weighted_balance_for_vertex;
use qgr::exppoly::secular_exppoly;
use qgr::gallery::{make_example, ExampleSpec};
use qgr::graph::{flatten, scale_to_unweighted};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in [1.5, 1.9, 2.0, 2.1, 3.0] {
        let spec = ExampleSpec::WeightedOneEdge {
            c,
            c1: 1.0,
            c2: 1.0,
            length: 1.into(),
        };
        let graph = make_example(&spec)?;
        let balance = weighted_balance_for_vertex(&graph, "v")?;
        let rescaled = scale_to_unweighted(&graph)?;
        let w = secular_exppoly(&flatten(&rescaled)?)
            .ok()
            .and_then(|p| p.effective_size().ok())
            .map_or("-".to_string(), |w| w.to_string());
        println!(
            "c = {c:<4} size l/c = {:.4}  W = {w:<6} balanced: {}",
            graph.weighted_size(),
            balance.non_weyl
        );
    }
    Ok(())
}
