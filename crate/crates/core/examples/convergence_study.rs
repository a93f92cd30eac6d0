//! Mesh refinement on example2_F against the exact solution `e^t`.

use dinclusion::solver::{self, EulerOptions};
use dinclusion::{SelectionPolicy, SetValuedMap};

fn main() -> dinclusion::Result<()> {
    let map = SetValuedMap::by_name("example2_F", None, None)?;
    let opts = EulerOptions::new(SelectionPolicy::lex_max()).with_v0(vec![1.0]);
    let (report, trajectories) = solver::converge(&map, &[1.0], 1.0, 125, 5, &opts, 4)?;
    println!("{:>6} {:>12} {:>12} {:>10}", "N", "x(1)", "|x(1)-e|", "residual");
    for (level, traj) in report.levels.iter().zip(&trajectories) {
        let x1 = traj.terminal()[0];
        println!(
            "{:>6} {:>12.8} {:>12.3e} {:>10.1e}",
            level.steps,
            x1,
            (x1 - std::f64::consts::E).abs(),
            level.max_interval_residual
        );
    }
    println!("\ndeltas {:?}", report.deltas);
    println!("ratios {:?}", report.ratios());

    let exact = SetValuedMap::by_name("example4", Some(1), None)?;
    let (report, _) = solver::converge(
        &exact,
        &[-1.0],
        1.0,
        8,
        4,
        &EulerOptions::default().with_v0(vec![-1.0]),
        4,
    )?;
    println!("\nexample4(1) deltas {:?}", report.deltas);
    Ok(())
}
