//! Resonances of the loop with two leads in a box, checked against the
//! closed-form resonance condition.

use qgr::gallery::{make_example, oracle_loop_condition, ExampleSpec};
use qgr::graph::flatten;
use qgr::zeros::{locate_zeros, EvalMode, Rect, SecularEvaluator, ZerosConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ExampleSpec = "loop-two-leads:alpha=1,beta=1".parse()?;
    let model = flatten(&make_example(&spec)?)?;
    let eval = SecularEvaluator::new(&model, EvalMode::Auto)?;
    let region = Rect::new(-0.5, 20.0, -6.0, 0.5);
    let zeros = locate_zeros(&eval, &region, 1e-10, &ZerosConfig::default())?;
    println!("{} zeros of {spec} in {region:?}", zeros.len());
    for z in zeros {
        let closed = oracle_loop_condition(1.0, 1.0, 1.0, z.k)?;
        println!(
            "k = {:+.12} {:+.12}i  m = {}  {}  |closed form| = {:.1e}",
            z.k.re,
            z.k.im,
            z.multiplicity,
            z.status,
            closed.norm()
        );
    }
    Ok(())
}
