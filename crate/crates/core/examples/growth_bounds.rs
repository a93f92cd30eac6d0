//! A-priori bounds from the linear growth constants, and estimated constants.

use dinclusion::analyzer;
use dinclusion::solver;
use dinclusion::SetValuedMap;

fn main() -> dinclusion::Result<()> {
    let b = solver::gronwall_bounds(1.0, 1.0, 1.0, 1.0)?;
    println!(
        "A=1 B=1 |x0|=1 T=1: L={:.6} M={:.6} min N={}",
        b.l,
        b.m,
        solver::min_steps(&b)
    );
    let b = solver::gronwall_bounds(1.0, 0.0, 2.0, 3.0)?;
    println!(
        "A=1 B=0 |x0|=2 T=3: L={:.6} M={:.6} min N={}",
        b.l,
        b.m,
        solver::min_steps(&b)
    );

    for name in ["example1", "example2_F", "example2_G", "example3"] {
        let map = SetValuedMap::by_name(name, None, None)?;
        let (est, violation, samples) = analyzer::estimate_growth(&map, 10.0, 2000, 1)?;
        println!(
            "{name:<11} declared {:?}, fitted A={:.3} B={:.3} from {samples} samples, violation {}",
            map.growth().map(|g| (g.a, g.b)),
            est.a,
            est.b,
            violation.is_some()
        );
    }
    Ok(())
}
