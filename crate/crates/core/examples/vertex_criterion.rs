//! Per-vertex non-Weyl criterion on every catalog graph, next to the symbolic
//! effective size.

use qgr::criteria::{classify_model, CriterionConfig};
use qgr::exppoly::{secular_exppoly_with, SymbolicConfig};
use qgr::gallery::{catalog, make_example};
use qgr::graph::{flatten, scale_to_unweighted};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SymbolicConfig {
        cap: 30,
        ..SymbolicConfig::default()
    };
    for spec in catalog() {
        let graph = make_example(&spec)?;
        let graph = if graph.is_weighted() { scale_to_unweighted(&graph)? } else { graph };
        let model = flatten(&graph)?;
        let verdicts = classify_model(&model, &CriterionConfig::default())?;
        let nonweyl: Vec<&str> = verdicts
            .iter()
            .filter(|c| c.non_weyl)
            .map(|c| c.vertex.as_str())
            .collect();
        let w = secular_exppoly_with(&model, &cfg)
            .ok()
            .and_then(|e| e.poly.effective_size().ok())
            .map(|w| w.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<55} V = {:<6} W = {:<6} non-Weyl vertices: {}",
            spec.to_string(),
            model.size().to_string(),
            w,
            if nonweyl.is_empty() { "none".to_string() } else { nonweyl.join(",") }
        );
    }
    Ok(())
}
