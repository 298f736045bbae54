use meoh::pareto::{
    dominates, hypervolume, igd, nondominated_filter, normalize, NormalizationBounds, ObjectiveVector, ReferencePoint,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

fn ov(v: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(v.to_vec()).unwrap()
}

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.2, 0.0f64..1.2), 1..max)
}

#[test]
fn single_point_volumes() {
    let r = ReferencePoint::default();
    assert!((hypervolume(&[ov(&[0.5, 0.5])], &r).unwrap() - 0.36).abs() < 1e-12);
    assert!((hypervolume(&[ov(&[0.0, 0.0])], &r).unwrap() - 1.21).abs() < 1e-12);
}

#[test]
fn random_fronts_match_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..3 {
        let pts: Vec<(f64, f64)> = (0..rng.random_range(1..8)).map(|_| (rng.random(), rng.random())).collect();
        let exact = hypervolume(&pts.iter().map(|&(x, y)| ov(&[x, y])).collect::<Vec<_>>(), &ReferencePoint::default())
            .unwrap();
        let estimate = common::hv_monte_carlo(&pts, 1.1, 2_000_000, &mut rng);
        assert!((exact - estimate).abs() < 3e-3, "{exact} vs {estimate}");
    }
}

proptest! {
    #[test]
    fn filter_and_dominance_match_oracle(pts in prop::collection::vec(prop::collection::vec(0u8..5, 3), 1..20)) {
        let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&x| f64::from(x)).collect()).collect();
        let vs: Vec<ObjectiveVector> = rows.iter().map(|r| ov(r)).collect();
        prop_assert_eq!(nondominated_filter(&vs), common::nondominated(&rows));
        for a in 0..rows.len() {
            for b in 0..rows.len() {
                prop_assert_eq!(dominates(&vs[a], &vs[b]).unwrap(), common::dominates(&rows[a], &rows[b]));
            }
        }
    }

    #[test]
    fn adding_points_never_lowers_volume(base in points(10), extra in (0.0f64..1.2, 0.0f64..1.2)) {
        let r = ReferencePoint::default();
        let mut set: Vec<ObjectiveVector> = base.iter().map(|&(x, y)| ov(&[x, y])).collect();
        let before = hypervolume(&set, &r).unwrap();
        set.push(ov(&[extra.0, extra.1]));
        prop_assert!(hypervolume(&set, &r).unwrap() >= before - 1e-15);
    }

    #[test]
    fn igd_matches_double_loop(a in points(12), b in points(12)) {
        let av: Vec<ObjectiveVector> = a.iter().map(|&(x, y)| ov(&[x, y])).collect();
        let bv: Vec<ObjectiveVector> = b.iter().map(|&(x, y)| ov(&[x, y])).collect();
        let rows = |p: &[(f64, f64)]| p.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>();
        prop_assert!((igd(&av, &bv).unwrap() - common::igd(&rows(&a), &rows(&b))).abs() < 1e-12);
        prop_assert_eq!(igd(&av, &av).unwrap(), 0.0);
    }

    #[test]
    fn normalized_volume_ignores_axis_scale(pts in points(10)) {
        let raw: Vec<ObjectiveVector> = pts.iter().map(|&(x, y)| ov(&[x, y])).collect();
        let scaled: Vec<ObjectiveVector> = pts.iter().map(|&(x, y)| ov(&[x * 1000.0, y])).collect();
        let hv = |set: &[ObjectiveVector]| {
            let b = NormalizationBounds::from_points(set).unwrap();
            let n: Vec<ObjectiveVector> = set.iter().map(|p| normalize(p, &b)).collect();
            hypervolume(&n, &ReferencePoint::default()).unwrap()
        };
        prop_assert!((hv(&raw) - hv(&scaled)).abs() < 1e-12);
    }
}
