//! Load a map file, evaluate it, and write a built-in back out as a map file.
//!
//! Run with `cargo run --example map_files [path/to/map.json]`.

use std::path::PathBuf;

use dinclusion::mapdsl::{self, parse_expr};
use dinclusion::SetValuedMap;

fn main() -> dinclusion::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("maps/example3.json"));
    let map = mapdsl::load_map(&path)?;
    mapdsl::validate(&map)?;
    println!("{} loaded: {map}, growth {:?}", path.display(), map.growth());
    for x in [-1.0, 0.0, 8.0] {
        let mut point = vec![0.0; map.dim()];
        point[0] = x;
        println!("  F({point:?}) has {} boxes", map.evaluate(&point)?.boxes().len());
    }

    let expr = parse_expr("cbrt(x1) + 1")?;
    println!("\nparsed `cbrt(x1) + 1` as {expr}, value at 8: {}", expr.eval(&[8.0]));
    if let Err(e) = parse_expr("2 * (x1 + ") {
        println!("error report: {e}");
    }

    let inline = r#"{"dim": 1, "pieces": [
        {"region": [{"var": 1, "op": "lt", "bound": 0}], "image": [[["-1", "-1"]]]},
        {"region": [{"var": 1, "op": "ge", "bound": 0}], "image": [[["0.5 * x", "x + 1"]]]}
    ]}"#;
    let custom = mapdsl::parse_map(inline)?;
    println!("\ncustom map at 2: {:?}", custom.evaluate(&[2.0])?);

    let e1 = SetValuedMap::by_name("example1", None, None)?;
    println!("\nexample1 as a map file:\n{}", mapdsl::to_text(&e1));
    Ok(())
}
