//! The sign-constrained velocity choice at a single Euler step.

use dinclusion::selector::{feasible_region, select_velocity};
use dinclusion::{CompactSet, SelectionPolicy, SignPattern};

fn main() -> dinclusion::Result<()> {
    // F(x) = [-2,-1] u [1,2] in the second coordinate, first coordinate [0,1]
    let image = CompactSet::new(vec![
        dinclusion::Hyperbox::new(vec![0.0, -2.0], vec![1.0, -1.0])?,
        dinclusion::Hyperbox::new(vec![0.0, 1.0], vec![1.0, 2.0])?,
    ])?;
    let prev = [0.25, 1.5];
    let signs = SignPattern::of(&prev);
    println!("previous velocity {prev:?}, signs {:?}", signs.as_slice());
    if let Some(region) = feasible_region(&image, &prev, &signs, 0.0)? {
        for b in region.boxes() {
            println!("  feasible box {:?}..{:?}", b.lo(), b.hi());
        }
    }
    for policy in [
        SelectionPolicy::project(),
        SelectionPolicy::lex_min(),
        SelectionPolicy::lex_max(),
    ] {
        let v = select_velocity(&image, &prev, &signs, &policy)?;
        println!("  {:<8} -> {v:?}", policy.kind);
    }

    let prev = [0.25, 2.5];
    match select_velocity(&image, &prev, &SignPattern::of(&prev), &SelectionPolicy::project()) {
        Ok(v) => println!("unexpected selection {v:?}"),
        Err(e) => println!("previous velocity {prev:?}: {e}"),
    }
    let relaxed = SelectionPolicy::new(dinclusion::PolicyKind::Project, 0.5)?;
    let v = select_velocity(&image, &prev, &SignPattern::of(&prev), &relaxed)?;
    println!("with slack 0.5 -> {v:?}");
    Ok(())
}
