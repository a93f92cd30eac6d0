use dinclusion::selector::{feasible_region, select_velocity, PolicyKind, SelectionPolicy, SignPattern};
use dinclusion::{CompactSet, Hyperbox};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (CompactSet, Vec<f64>, SignPattern)> {
    (1usize..=3).prop_flat_map(|d| {
        let b = prop::collection::vec((-3.0f64..3.0, 0.0f64..2.0, prop::bool::weighted(0.2)), d).prop_map(|cs| {
            let lo: Vec<f64> = cs.iter().map(|c| c.0).collect();
            let hi = cs.iter().map(|&(l, w, p)| if p { l } else { l + w }).collect();
            Hyperbox::new(lo, hi).unwrap()
        });
        (
            prop::collection::vec(b, 1..4).prop_map(|b| CompactSet::new(b).unwrap()),
            prop::collection::vec(-4.0f64..4.0, d),
            prop::collection::vec(-1i8..=1, d).prop_map(|s| SignPattern::new(s).unwrap()),
        )
    })
}

fn policy() -> impl Strategy<Value = SelectionPolicy> {
    (
        prop::sample::select(vec![PolicyKind::Project, PolicyKind::LexMin, PolicyKind::LexMax]),
        prop::sample::select(vec![0.0, 0.0, 0.25]),
    )
        .prop_map(|(k, s)| SelectionPolicy::new(k, s).unwrap())
}

fn satisfies(v: &[f64], prev: &[f64], signs: &SignPattern, slack: f64) -> bool {
    signs
        .as_slice()
        .iter()
        .zip(v.iter().zip(prev))
        .all(|(&s, (vj, pj))| f64::from(s) * (vj - pj) >= -slack)
}

fn grid_has_feasible(image: &CompactSet, prev: &[f64], signs: &SignPattern, slack: f64) -> bool {
    let per_axis = (10_000f64.powf(1.0 / image.dim() as f64)).floor() as usize;
    image.boxes().iter().any(|b| {
        let mut pts = vec![Vec::new()];
        for j in 0..b.dim() {
            let (lo, hi) = (b.lo()[j], b.hi()[j]);
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    (0..per_axis).map(move |k| {
                        let mut q = p.clone();
                        q.push(lo + (hi - lo) * k as f64 / (per_axis - 1) as f64);
                        q
                    })
                })
                .collect();
        }
        pts.iter().any(|v| b.contains(v) && satisfies(v, prev, signs, slack))
    })
}

proptest! {
    #[test]
    fn selection_is_sound((image, prev, signs) in instance(), pol in policy()) {
        if let Ok(v) = select_velocity(&image, &prev, &signs, &pol) {
            prop_assert!(satisfies(&v, &prev, &signs, pol.slack));
            prop_assert_eq!(image.distance(&v).unwrap(), 0.0);
        }
    }

    #[test]
    fn feasible_region_is_complete((image, prev, signs) in instance(), pol in policy()) {
        let region = feasible_region(&image, &prev, &signs, pol.slack).unwrap();
        if grid_has_feasible(&image, &prev, &signs, pol.slack) {
            prop_assert!(region.is_some());
        }
        prop_assert_eq!(region.is_some(), select_velocity(&image, &prev, &signs, &pol).is_ok());
    }

    #[test]
    fn selection_is_deterministic((image, prev, signs) in instance(), pol in policy()) {
        let a = select_velocity(&image, &prev, &signs, &pol).ok();
        let b = select_velocity(&image, &prev, &signs, &pol).ok();
        let bits = |v: Option<Vec<f64>>| v.map(|v| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(bits(a), bits(b));
    }

    #[test]
    fn no_move_against_sign_without_slack((image, prev, signs) in instance(), kind in prop::sample::select(vec![PolicyKind::Project, PolicyKind::LexMin, PolicyKind::LexMax])) {
        let pol = SelectionPolicy::new(kind, 0.0).unwrap();
        if let Ok(v) = select_velocity(&image, &prev, &signs, &pol) {
            for (j, &s) in signs.as_slice().iter().enumerate() {
                if s > 0 {
                    prop_assert!(v[j] >= prev[j]);
                } else if s < 0 {
                    prop_assert!(v[j] <= prev[j]);
                }
            }
        }
    }
}
