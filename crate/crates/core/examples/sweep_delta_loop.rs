//! Resonances of the delta loop escaping to infinity as the coupling
//! strength goes to zero, while the embedded eigenvalues stay put.

use qgr::gallery::{make_example, ExampleSpec};
use qgr::graph::flatten;
use qgr::zeros::{sweep_parameter, EvalMode, Rect, SecularEvaluator, ZeroError, ZerosConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base: ExampleSpec = "loop-two-leads:beta=1".parse()?;
    let schedule: Vec<f64> = (0..10).map(|j| 10f64.powf(-(j as f64) / 3.0)).collect();
    let family = |alpha: f64| {
        let spec = base
            .with_real("alpha", alpha)
            .map_err(|e| ZeroError::InvalidInput(e.to_string()))?;
        let graph = make_example(&spec).map_err(|e| ZeroError::InvalidInput(e.to_string()))?;
        let model = flatten(&graph).map_err(|e| ZeroError::InvalidInput(e.to_string()))?;
        SecularEvaluator::new(&model, EvalMode::Auto)
    };
    let region = Rect::new(0.5, 8.0, -12.0, 0.5);
    let traj = sweep_parameter("alpha", family, &schedule, &region, 1e-10, &ZerosConfig::default())?;
    for step in &traj.steps {
        let ks: Vec<String> = step
            .zeros
            .iter()
            .map(|z| format!("#{} {:.4}{:+.4}i", z.track_id, z.k.re, z.k.im))
            .collect();
        println!(
            "alpha = {:.2e}  -log(1/alpha) = {:+.3}  {}",
            step.value,
            step.value.ln(),
            ks.join("  ")
        );
    }
    Ok(())
}
