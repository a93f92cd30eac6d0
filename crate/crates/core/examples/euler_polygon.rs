//! Euler polygons: an exact case, a CSV export, and an infeasible start.
//!
//! Run with `cargo run --example euler_polygon [out.csv]`.

use std::fs::File;

use dinclusion::analyzer;
use dinclusion::solver::{self, EulerOptions};
use dinclusion::{Error, SelectionPolicy, SetValuedMap};

fn main() -> dinclusion::Result<()> {
    let map = SetValuedMap::by_name("example4", Some(2), None)?;
    let opts = EulerOptions::default().with_v0(vec![-1.0, -1.0]);
    let traj = solver::euler_polygon(&map, &[-1.0, -0.5], 1.0, 16, &opts)?;
    println!(
        "example4(2): terminal {:?}, x(0.3) = {:?}",
        traj.terminal(),
        traj.interpolate(0.3)?
    );
    for c in analyzer::check_trajectory_monotone(&traj) {
        println!("  coordinate {} {:?}, monotone: {}", c.coordinate, c.class, c.holds());
    }

    let f = SetValuedMap::by_name("example2_F", None, None)?;
    for policy in [SelectionPolicy::project(), SelectionPolicy::lex_max()] {
        let t = solver::euler_polygon(&f, &[1.0], 1.0, 100, &EulerOptions::new(policy).with_v0(vec![1.0]))?;
        println!("example2_F, {:<8} x(1) = {:.6}", policy.kind, t.terminal()[0]);
    }

    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("example4_trajectory.csv")
            .display()
            .to_string()
    });
    traj.write_csv(File::create(&path)?)?;
    println!("wrote {path}");

    let antisign = SetValuedMap::by_name("antisign", None, None)?;
    match solver::euler_polygon(&antisign, &[1.0], 2.0, 64, &EulerOptions::default().with_v0(vec![-1.0])) {
        Err(Error::WcmInfeasible(cert)) => println!("antisign: {cert}"),
        other => println!("antisign: unexpected {:?}", other.map(|t| t.terminal().to_vec())),
    }
    Ok(())
}
