//! Sampled checks of the structural conditions on the built-in maps.

use dinclusion::analyzer::{self, CheckReport};
use dinclusion::SetValuedMap;

fn line(map: &SetValuedMap, report: &CheckReport) {
    let cert = report
        .certificate
        .as_ref()
        .map(|c| serde_json::to_string(c).unwrap_or_default())
        .unwrap_or_default();
    let condition = format!("{:?}", report.condition);
    let verdict = format!("{:?}", report.verdict);
    println!("{:<14} {condition:<12} {verdict:<12} {cert}", map.to_string());
}

fn main() -> dinclusion::Result<()> {
    let maps = [
        SetValuedMap::by_name("example1", None, None)?,
        SetValuedMap::by_name("example2_F", None, None)?,
        SetValuedMap::by_name("example2_G", None, None)?,
        SetValuedMap::by_name("example3", None, None)?,
        SetValuedMap::by_name("example4", Some(2), None)?,
        SetValuedMap::by_name("normgrad", Some(2), Some(4))?,
    ];
    for map in &maps {
        line(map, &analyzer::check_wcm(map, 5.0, 10_000, 42)?);
        line(map, &analyzer::find_monotonicity_violation(map, 5.0, 10_000, 42)?);
        line(map, &analyzer::find_cyclic_violation(map, 5.0, 3, 2_000, 42)?);
        line(map, &analyzer::check_closed_graph(map, 5.0, 500, 42, 1e-3)?);
    }

    let ng = &maps[5];
    if let Some(cert) = analyzer::check_wcm_pair(ng, &[1.0, 3.0], &[0.9, 0.0])? {
        println!(
            "\nnormgrad at (1,3) vs (0.9,0): {}",
            serde_json::to_string_pretty(&cert).unwrap_or_default()
        );
        println!("replays: {}", cert.verify(ng)?);
    }
    Ok(())
}
