//! Effective size of regular polygons with two leads per vertex: symbolic
//! value, closed form, and the resonances from the channel decomposition.

use num_rational::Rational64;
use qgr::exppoly::{secular_exppoly_with, SymbolicConfig};
use qgr::gallery::{make_example, oracle_polygon_resonances, polygon_effective_size, ExampleSpec};
use qgr::graph::flatten;
use qgr::zeros::Rect;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SymbolicConfig {
        cap: 64,
        ..SymbolicConfig::default()
    };
    for n in 3..=8 {
        let spec = ExampleSpec::Polygon {
            n,
            side: Rational64::from_integer(1),
        };
        let model = flatten(&make_example(&spec)?)?;
        let w = secular_exppoly_with(&model, &cfg)?.poly.effective_size()?;
        let theorem = polygon_effective_size(n, Rational64::from_integer(1));
        let zeros = oracle_polygon_resonances(n, Rational64::from_integer(1), &Rect::new(0.0, 10.0, -5.0, 0.5));
        println!(
            "n = {n}: W = {w:<4} theorem {theorem:<4} V = {n}  ({} resonances with 0 <= Re k <= 10)",
            zeros.iter().map(|z| z.multiplicity).sum::<usize>()
        );
    }
    Ok(())
}
