//! The secular function of the loop with two leads as an exponential
//! polynomial, compared with the determinant and the closed form.

use num_complex::Complex64;
use qgr::exppoly::secular_exppoly;
use qgr::gallery::{make_example, oracle_loop_condition, ExampleSpec};
use qgr::graph::flatten;
use qgr::zeros::{EvalMode, SecularEvaluator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ExampleSpec = "loop-two-leads:alpha=1,beta=1".parse()?;
    let model = flatten(&make_example(&spec)?)?;
    let poly = secular_exppoly(&model)?;
    println!("{spec}");
    println!("F(k) = {poly}");
    println!("effective size W = {}", poly.effective_size()?);

    let direct = SecularEvaluator::new_raw(&model, EvalMode::Stabilized)?;
    println!("{:>14} {:>26} {:>26} {:>26}", "k", "exppoly", "determinant", "closed form");
    for k in [Complex64::new(2.0, 1.0), Complex64::new(-3.5, -0.5), Complex64::new(7.0, -2.0)] {
        println!(
            "{:>14} {:>26.12} {:>26.12} {:>26.12}",
            format!("{k}"),
            poly.evaluate(k),
            direct.value(k).to_complex(),
            oracle_loop_condition(1.0, 1.0, 1.0, k)?
        );
    }
    Ok(())
}
