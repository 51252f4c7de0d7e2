use proptest::prelude::*;

use super::*;
use crate::realnum::DoubleDouble;

fn set(raw: &[(f64, f64)]) -> IntervalSet<f64> {
    IntervalSet::from_intervals(raw.to_vec()).unwrap()
}

#[test]
fn union_merges_touching_intervals() {
    let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
    assert_eq!(a.union(&set(&[(1.0, 2.0)])).intervals(), &[(0.0, 3.0)]);
    assert_eq!(a.union(&IntervalSet::empty()), a);
    assert_eq!(a.union(&set(&[(0.5, 2.5)])).intervals(), &[(0.0, 3.0)]);
    assert!(IntervalSet::from_intervals(vec![(1.0, 0.0)]).is_err());
    assert!(IntervalSet::from_intervals(vec![(0.0, f64::INFINITY)]).is_err());
}

#[test]
fn containment_with_fattening() {
    let a = set(&[(0.0, 1.0)]);
    assert!(a.contains(&set(&[(0.2, 0.3)]), 0.0));
    assert!(!a.contains(&set(&[(0.0, 1.1)]), 0.05));
    assert!(a.contains(&set(&[(0.0, 1.1)]), 0.2));
    assert!(a.contains(&IntervalSet::empty(), 0.0));
    let two = set(&[(0.0, 1.0), (1.05, 2.0)]);
    assert!(!two.contains(&set(&[(0.5, 1.5)]), 0.0));
    assert!(two.contains(&set(&[(0.5, 1.5)]), 0.03));
    assert!(two.contains_point(1.0) && !two.contains_point(1.01) && two.contains_point(2.0));
}

#[test]
fn gaps_and_hull() {
    let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
    assert_eq!(a.gaps(None).intervals(), &[(1.0, 2.0)]);
    assert!(set(&[(0.0, 1.0)]).gaps(None).is_empty());
    assert_eq!(a.gaps(Some((-1.0, 4.0))).intervals(), &[(-1.0, 0.0), (1.0, 2.0), (3.0, 4.0)]);
    assert_eq!(set(&[(0.0, 1.0), (3.0, 4.0)]).largest_gap(), 2.0);
}

#[test]
fn minkowski_examples() {
    let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
    assert_eq!(a.minkowski_sum(&a).unwrap().intervals(), &[(0.0, 6.0)]);
    assert_eq!(a.minkowski_sum(&set(&[(0.0, 0.0)])).unwrap(), a);
    let cantorish = set(&[(0.0, 0.1), (0.9, 1.0)]);
    assert_eq!(cantorish.minkowski_sum(&cantorish).unwrap().len(), 3);
}

#[test]
fn json_uses_decimal_strings() {
    let a = IntervalSet::<DoubleDouble>::from_intervals(vec![(DoubleDouble::one() / DoubleDouble::from_i64(3), DoubleDouble::one())]).unwrap();
    let text = serde_json::to_string(&a.to_json()).unwrap();
    assert!(text.starts_with("{\"intervals\":[[\""));
    let back: IntervalSet<DoubleDouble> = IntervalSet::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn zero_coupling_cover_is_the_free_band() {
    for model in [Model::period_doubling(0.0), Model::thue_morse(0.0), Model::fibonacci(0.0)] {
        for k in [1, 3, 5] {
            let c = build_cover(&model, k).unwrap();
            let (lo, hi) = c.cover.hull().unwrap();
            assert!(c.cover.largest_gap() < 1e-12);
            assert!((lo + 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        }
    }
}

#[test]
fn period_doubling_covers_nest() {
    let model = Model::period_doubling(1.0);
    let c5 = build_cover(&model, 5).unwrap();
    let c6 = build_cover(&model, 6).unwrap();
    assert!(c5.cover.contains(&c6.cover, c6.tolerance()));
    assert!(c6.cover.measure() <= c5.cover.measure() + c6.tolerance());
    assert_eq!(c6.raw_bands().count(), 64 + 64);
}

#[test]
fn fibonacci_covers_nest_at_strong_coupling() {
    let model = Model::fibonacci(4.0);
    let covers = build_cover_sequence(&model, 10, 11, DEFAULT_MAX_WORD_LENGTH).unwrap();
    assert!(covers[0].cover.contains(&covers[1].cover, covers[1].tolerance()));
    let direct = build_cover(&model, 11).unwrap();
    assert_eq!(direct.cover, covers[1].cover);
}

#[test]
fn non_substitution_models_have_no_cover() {
    let am = Model::new(
        ModelKind::AlmostMathieu { alpha: crate::substitution::Rotation::new(1, 3).unwrap(), theta: 0.0 },
        1.0,
    )
    .unwrap();
    assert!(build_cover(&am, 2).is_err());
    assert!(build_cover(&Model::fibonacci(1.0), 0).is_err());
}

#[test]
fn period_doubling_trace_map() {
    let energies: Vec<f64> = (0..100).map(|i| -3.0 + 7.0 * i as f64 / 99.0).collect();
    let r = check_trace_map(&Model::period_doubling(1.0), 3, &energies).unwrap();
    assert_eq!(r.evaluated, 100);
    assert!(r.trace_residual <= 1e-10 && r.matrix_residual <= 1e-10);
    let free = check_trace_map(&Model::period_doubling(0.0), 3, &energies).unwrap();
    assert!(free.trace_residual <= 1e-12);
}

#[test]
fn thue_morse_trace_map_at_band_midpoints() {
    let model = Model::thue_morse(DoubleDouble::from_i64(2));
    let cover = build_cover(&model, 4).unwrap();
    let samples = default_trace_samples(&cover.cover);
    let r = check_trace_map(&model, 4, &samples).unwrap();
    assert!(r.evaluated > 0 && r.skipped.is_empty());
    assert!(r.trace_residual.to_f64() <= 1e-8);
}

#[test]
fn extended_precision_shrinks_trace_map_residuals() {
    let energies: Vec<f64> = (0..40).map(|i| -1.9 + 4.3 * i as f64 / 39.0 + 1e-3).collect();
    let dd: Vec<DoubleDouble> = energies.iter().map(|&e| DoubleDouble::from_f64(e)).collect();
    let lam = 1.7;
    let d = check_trace_map(&Model::period_doubling(lam), 6, &energies).unwrap();
    let x = check_trace_map(&Model::period_doubling(DoubleDouble::from_f64(lam)), 6, &dd).unwrap();
    assert!(d.trace_residual > 0.0);
    assert!(x.trace_residual.to_f64() * 1e10 <= d.trace_residual);
}

#[test]
fn overflowing_energies_are_skipped() {
    let r = check_trace_map(&Model::thue_morse(1.0), 9, &[0.5, 1e200]).unwrap();
    assert_eq!(r.evaluated, 1);
    assert_eq!(r.skipped.len(), 1);
}

fn arb_set() -> impl Strategy<Value = IntervalSet<f64>> {
    prop::collection::vec((-8i32..8, 0i32..4), 0..6).prop_map(|raw| {
        IntervalSet::from_intervals(raw.into_iter().map(|(lo, w)| (lo as f64 * 0.5, (lo + w) as f64 * 0.5)).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn union_is_idempotent(a in arb_set()) {
        prop_assert_eq!(a.union(&a), a);
    }

    #[test]
    fn minkowski_is_commutative_and_associative(a in arb_set(), b in arb_set(), c in arb_set()) {
        prop_assert_eq!(a.minkowski_sum(&b).unwrap(), b.minkowski_sum(&a).unwrap());
        let left = a.minkowski_sum(&b).unwrap().minkowski_sum(&c).unwrap();
        let right = a.minkowski_sum(&b.minkowski_sum(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn normalized_sets_are_disjoint(a in arb_set(), b in arb_set()) {
        let u = a.union(&b);
        for w in u.intervals().windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        prop_assert!(u.contains(&a, 0.0) && u.contains(&b, 0.0));
    }
}
