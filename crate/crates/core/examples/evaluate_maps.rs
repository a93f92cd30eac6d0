//! Evaluate the built-in maps and the product / union combinators.
//!
//! Run with `cargo run --example evaluate_maps`.

use dinclusion::{Builtin, CompactSet, Hyperbox, SetValuedMap};

fn show(label: &str, set: &CompactSet) {
    let boxes: Vec<String> = set
        .boxes()
        .iter()
        .map(|b| format!("{:?}..{:?}", b.lo(), b.hi()))
        .collect();
    println!("{label:<32} {}", boxes.join(" u "));
}

fn main() -> dinclusion::Result<()> {
    for info in Builtin::catalog() {
        println!("{:<11} {}", info.name, info.encodes);
    }
    println!();

    let e1 = SetValuedMap::by_name("example1", None, None)?;
    show("example1(-0.5)", &e1.evaluate(&[-0.5])?);
    show("example1(0)", &e1.evaluate(&[0.0])?);

    let f = SetValuedMap::by_name("example2_F", None, None)?;
    show("example2_F(8)", &f.evaluate(&[8.0])?);

    let e3 = SetValuedMap::by_name("example3", None, None)?;
    show("example3(1, 0)", &e3.evaluate(&[1.0, 0.0])?);

    let e4 = SetValuedMap::by_name("example4", Some(2), None)?;
    show("example4(2) at (-1, -1)", &e4.evaluate(&[-1.0, -1.0])?);

    let ng = SetValuedMap::by_name("normgrad", Some(2), Some(4))?;
    show("normgrad(2,4) at origin", &ng.evaluate(&[0.0, 0.0])?);

    let product = SetValuedMap::product(&e1, &f);
    show("example1 x example2_F at (-1, 8)", &product.evaluate(&[-1.0, 8.0])?);

    let shifted = SetValuedMap::constant(&CompactSet::from_box(Hyperbox::interval(2.0, 3.0)?));
    let union = SetValuedMap::union(&e1, &shifted)?;
    show("example1 u [2,3] at 1", &union.evaluate(&[1.0])?);
    println!("sup norm of that image: {}", union.evaluate(&[1.0])?.sup_norm());
    Ok(())
}
