//! Mixing the two leads of the single-edge graph by a random unitary leaves
//! the resonances unchanged.

use qgr::gallery::{make_example, ExampleSpec};
use qgr::graph::{apply_lead_mixing, flatten};
use qgr::linalg::random_unitary;
use qgr::zeros::{locate_zeros, EvalMode, Rect, SecularEvaluator, ZerosConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ExampleSpec = "es-two-leads".parse()?;
    let model = flatten(&make_example(&spec)?)?;
    let region = Rect::new(-0.5, 20.0, -10.0, 0.25);
    let cfg = ZerosConfig::default();
    let base = locate_zeros(&SecularEvaluator::new(&model, EvalMode::Auto)?, &region, 1e-10, &cfg)?;
    println!("{spec}: {} zeros", base.len());
    for z in &base {
        println!("  {:+.12} {:+.12}i", z.k.re, z.k.im);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..5 {
        let w4 = random_unitary(2, &mut rng);
        let mixed = apply_lead_mixing(&model, "v", 0.3 * trial as f64, &w4)?;
        let zeros = locate_zeros(&SecularEvaluator::new(&mixed, EvalMode::Auto)?, &region, 1e-10, &cfg)?;
        let shift = zeros
            .iter()
            .map(|a| base.iter().map(|b| (a.k - b.k).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        println!("mixer {trial}: {} zeros, largest shift {shift:.1e}", zeros.len());
    }
    Ok(())
}
