//! Counting function N(R) of a square with leads and the fitted effective size.

use qgr::gallery::{make_example, polygon_effective_size, ExampleSpec};
use qgr::graph::flatten;
use qgr::zeros::{counting_function, EvalMode, SecularEvaluator, ZerosConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ExampleSpec = "polygon:n=4".parse()?;
    let model = flatten(&make_example(&spec)?)?;
    let eval = SecularEvaluator::new(&model, EvalMode::Auto)?;
    let radii: Vec<f64> = (1..=16).map(|j| 5.0 * j as f64).collect();
    let table = counting_function(&eval, &radii, &ZerosConfig::default())?;
    for s in &table.samples {
        println!("N({:5.1}) = {}", s.used_radius, s.count.map_or("?".into(), |n| n.to_string()));
    }
    println!(
        "W_est = {:.4} +- {:.4}, theorem {} (V = 4)",
        table.w_est,
        table.half_width,
        polygon_effective_size(4, 1.into())
    );
    Ok(())
}
