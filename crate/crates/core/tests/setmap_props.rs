use dinclusion::{CompactSet, Hyperbox, SetValuedMap};
use proptest::prelude::*;

fn hyperbox(dim: usize) -> impl Strategy<Value = Hyperbox> {
    prop::collection::vec((-10.0f64..10.0, 0.0f64..5.0, prop::bool::weighted(0.2)), dim).prop_map(|cs| {
        let lo: Vec<f64> = cs.iter().map(|c| c.0).collect();
        let hi: Vec<f64> = cs.iter().map(|&(l, w, point)| if point { l } else { l + w }).collect();
        Hyperbox::new(lo, hi).unwrap()
    })
}

fn compact_set(dim: usize) -> impl Strategy<Value = CompactSet> {
    prop::collection::vec(hyperbox(dim), 1..5).prop_map(|b| CompactSet::new(b).unwrap())
}

fn set_and_point() -> impl Strategy<Value = (CompactSet, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|d| (compact_set(d), prop::collection::vec(-12.0f64..12.0, d)))
}

fn grid(b: &Hyperbox, per_axis: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for j in 0..b.dim() {
        let (lo, hi) = (b.lo()[j], b.hi()[j]);
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |k| {
                    let mut q = p.clone();
                    q.push(lo + (hi - lo) * k as f64 / (per_axis - 1) as f64);
                    q
                })
            })
            .collect();
    }
    pts
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn sample_maps() -> Vec<SetValuedMap> {
    ["example1", "example2_F", "example2_G", "antisign"]
        .iter()
        .map(|n| SetValuedMap::by_name(n, None, None).unwrap())
        .chain([
            SetValuedMap::by_name("example3", None, None).unwrap(),
            SetValuedMap::by_name("example4", Some(2), None).unwrap(),
            SetValuedMap::by_name("normgrad", Some(2), Some(6)).unwrap(),
            SetValuedMap::by_name("normgrad", Some(3), None).unwrap(),
        ])
        .collect()
}

proptest! {
    #[test]
    fn sup_norm_matches_grid((set, _) in set_and_point()) {
        let per_axis = 9;
        let mut brute = 0.0f64;
        let mut spacing = 0.0f64;
        for b in set.boxes() {
            for p in grid(b, per_axis) {
                brute = brute.max(norm(&p));
            }
            let widths: Vec<f64> = b.lo().iter().zip(b.hi()).map(|(l, h)| (h - l) / (per_axis - 1) as f64).collect();
            spacing = spacing.max(norm(&widths));
        }
        let s = set.sup_norm();
        prop_assert!(brute <= s * (1.0 + 1e-15));
        prop_assert!(s - brute <= spacing + 1e-12);
    }

    #[test]
    fn distance_zero_iff_contained((set, v) in set_and_point(), pick in prop::option::of((any::<prop::sample::Index>(), 0.0f64..1.0))) {
        let v = match pick {
            Some((idx, t)) => {
                let b = &set.boxes()[idx.index(set.boxes().len())];
                b.lo().iter().zip(b.hi()).map(|(l, h)| l + t * (h - l)).collect::<Vec<_>>()
            }
            None => v,
        };
        let inside = set.boxes().iter().any(|b| b.contains(&v));
        prop_assert_eq!(set.distance(&v).unwrap() == 0.0, inside);
        prop_assert_eq!(set.contains(&v), inside);
    }

    #[test]
    fn union_distance_is_min(
        (a, b, v) in (1usize..=3).prop_flat_map(|d| (compact_set(d), compact_set(d), prop::collection::vec(-12.0f64..12.0, d)))
    ) {
        let u = a.union(&b).unwrap();
        let want = a.distance(&v).unwrap().min(b.distance(&v).unwrap());
        prop_assert_eq!(u.distance(&v).unwrap(), want);

        let (fa, fb) = (SetValuedMap::constant(&a), SetValuedMap::constant(&b));
        let fu = SetValuedMap::union(&fa, &fb).unwrap();
        let x = vec![0.5; a.dim()];
        prop_assert_eq!(fu.evaluate(&x).unwrap().distance(&v).unwrap(), want);
    }

    #[test]
    fn product_projects_onto_factor(
        fi in 0usize..8,
        gi in 0usize..8,
        seed in prop::collection::vec(-4.0f64..4.0, 6),
    ) {
        let maps = sample_maps();
        let (f, g) = (&maps[fi], &maps[gi]);
        let p = SetValuedMap::product(f, g);
        prop_assert_eq!(p.dim(), f.dim() + g.dim());
        let xy = &seed[..p.dim()];
        let (x, y) = xy.split_at(f.dim());
        let fx = f.evaluate(x).unwrap();
        let gy = g.evaluate(y).unwrap();
        for vert in p.evaluate(xy).unwrap().vertices().unwrap() {
            prop_assert_eq!(fx.distance(&vert[..f.dim()]).unwrap(), 0.0);
            prop_assert_eq!(gy.distance(&vert[f.dim()..]).unwrap(), 0.0);
        }
    }

    #[test]
    fn evaluate_is_pure(mi in 0usize..8, seed in prop::collection::vec(-4.0f64..4.0, 3), zero in prop::bool::ANY) {
        let maps = sample_maps();
        let m = &maps[mi];
        let mut x = seed[..m.dim()].to_vec();
        if zero {
            x[0] = 0.0;
        }
        let a = m.evaluate(&x).unwrap();
        let b = m.evaluate(&x).unwrap();
        prop_assert_eq!(a.boxes().len(), b.boxes().len());
        for (p, q) in a.boxes().iter().zip(b.boxes()) {
            let bits = |v: &[f64]| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(p.lo()), bits(q.lo()));
            prop_assert_eq!(bits(p.hi()), bits(q.hi()));
        }
    }
}

#[test]
fn evaluate_reports_dimension_mismatch() {
    let m = SetValuedMap::by_name("example3", None, None).unwrap();
    assert!(m.evaluate(&[1.0]).is_err());
}
