mod common;

use dinclusion::analyzer::{self, Certificate};
use dinclusion::{CompactSet, Hyperbox, SetValuedMap};
use proptest::prelude::*;

fn real_set(dim: usize) -> impl Strategy<Value = CompactSet> {
    let b = prop::collection::vec((-2.0f64..2.0, 0.0f64..1.5, prop::bool::weighted(0.25)), dim).prop_map(|cs| {
        let lo: Vec<f64> = cs.iter().map(|c| c.0).collect();
        let hi = cs.iter().map(|&(l, w, p)| if p { l } else { l + w }).collect();
        Hyperbox::new(lo, hi).unwrap()
    });
    prop::collection::vec(b, 1..4).prop_map(|b| CompactSet::new(b).unwrap())
}

/// `x ≠ y` with some coordinates shared, plus images at both.
fn pair_instance() -> impl Strategy<Value = (Vec<f64>, CompactSet, Vec<f64>, CompactSet)> {
    (1usize..=3).prop_flat_map(|d| {
        (
            prop::collection::vec(-2i32..=2, d),
            prop::collection::vec(-2i32..=2, d),
            real_set(d),
            real_set(d),
        )
            .prop_filter_map("x == y", |(x, y, fx, fy)| {
                let x: Vec<f64> = x.into_iter().map(f64::from).collect();
                let y: Vec<f64> = y.into_iter().map(f64::from).collect();
                (x != y).then_some((x, fx, y, fy))
            })
    })
}

fn grid(set: &CompactSet, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for b in set.boxes() {
        let mut pts = vec![Vec::new()];
        for j in 0..b.dim() {
            let (lo, hi) = (b.lo()[j], b.hi()[j]);
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    (0..per_axis).map(move |k| {
                        let mut q = p.clone();
                        let c = if k + 1 == per_axis {
                            hi
                        } else {
                            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
                        };
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out.extend(pts);
    }
    out
}

/// Some `w ∈ fy` with `(x_j - y_j)(v_j - w_j) ≥ 0` for every `j`, decided box by box.
fn v_has_partner(x: &[f64], y: &[f64], v: &[f64], fy: &CompactSet) -> bool {
    fy.boxes().iter().any(|b| {
        (0..x.len()).all(|j| {
            let d = x[j] - y[j];
            d == 0.0 || (d > 0.0 && b.lo()[j] <= v[j]) || (d < 0.0 && b.hi()[j] >= v[j])
        })
    })
}

fn dot_diff(x: &[f64], y: &[f64], v: &[f64], w: &[f64]) -> f64 {
    (0..x.len()).map(|j| (x[j] - y[j]) * (v[j] - w[j])).sum()
}

fn builtins() -> Vec<SetValuedMap> {
    vec![
        SetValuedMap::by_name("example1", None, None).unwrap(),
        SetValuedMap::by_name("example2_F", None, None).unwrap(),
        SetValuedMap::by_name("example2_G", None, None).unwrap(),
        SetValuedMap::by_name("example3", None, None).unwrap(),
        SetValuedMap::by_name("example4", Some(1), None).unwrap(),
        SetValuedMap::by_name("example4", Some(2), None).unwrap(),
        SetValuedMap::by_name("normgrad", Some(2), Some(4)).unwrap(),
        SetValuedMap::by_name("antisign", None, None).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hardest_corner_matches_grid((x, fx, y, fy) in pair_instance()) {
        let map = common::two_valued_map(&x, &fx, &y, &fy).unwrap();
        let got = analyzer::check_wcm_pair(&map, &x, &y).unwrap();
        let grid_ok = grid(&fx, 20).iter().all(|v| v_has_partner(&x, &y, v, &fy));
        prop_assert_eq!(got.is_none(), grid_ok);
        if let Some(cert) = got {
            prop_assert!(cert.verify(&map).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vertex_minimum_matches_grid((x, fx, y, fy) in pair_instance()) {
        let map = common::two_valued_map(&x, &fx, &y, &fy).unwrap();
        let (value, v, w) = analyzer::monotone_pair(&map, &x, &y).unwrap();
        prop_assert!(fx.contains(&v) && fy.contains(&w));
        let (gv, gw) = (grid(&fx, 5), grid(&fy, 5));
        let brute = gv
            .iter()
            .flat_map(|v| gw.iter().map(move |w| (v, w)))
            .map(|(v, w)| dot_diff(&x, &y, v, w))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((value - brute).abs() <= 1e-12 * (1.0 + brute.abs()), "{} vs {}", value, brute);
    }

    #[test]
    fn failure_certificates_replay(mi in 0usize..8, seed in any::<u64>(), which in 0usize..3) {
        let map = &builtins()[mi];
        let report = match which {
            0 => analyzer::check_wcm(map, 5.0, 300, seed),
            1 => analyzer::find_monotonicity_violation(map, 5.0, 300, seed),
            _ => analyzer::find_cyclic_violation(map, 5.0, 3, 300, seed),
        }
        .unwrap();
        if let Some(cert) = &report.certificate {
            let value = match cert {
                Certificate::Wcm { value, .. } | Certificate::Monotone { value, .. } | Certificate::Cyclic { value, .. } => *value,
                other => panic!("unexpected certificate {other:?}"),
            };
            prop_assert!(value < 0.0);
            prop_assert!(cert.verify(map).unwrap());
        }
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    for map in builtins() {
        let a = analyzer::check_wcm(&map, 5.0, 2000, 3).unwrap();
        let b = one.install(|| analyzer::check_wcm(&map, 5.0, 2000, 3)).unwrap();
        assert_eq!(a, b, "{map}");
        let a = analyzer::find_monotonicity_violation(&map, 5.0, 2000, 3).unwrap();
        let b = one
            .install(|| analyzer::find_monotonicity_violation(&map, 5.0, 2000, 3))
            .unwrap();
        assert_eq!(a, b, "{map}");
        let a = analyzer::check_closed_graph(&map, 5.0, 500, 3, 1e-3).unwrap();
        let b = analyzer::check_closed_graph(&map, 5.0, 500, 3, 1e-3).unwrap();
        assert_eq!(a, b, "{map}");
    }
}
