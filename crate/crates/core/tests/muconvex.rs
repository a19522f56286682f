use prodint_core::group::make_group;
use prodint_core::muconvex::{self, mu_convex_probe, mu_convex_probe_range};
use prodint_core::Seminorm;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn probe_merge_is_associative(seed in any::<u64>(), a in 0usize..40, b in 0usize..40) {
        let g = make_group("unit_group(2)").unwrap();
        let u = g.operator_seminorm();
        let o = u.clone().scaled(1.5);
        let (a, b) = (a.min(b), a.max(b));
        let part = |r: core::ops::Range<usize>| mu_convex_probe_range(&g, &u, &o, 5, r, seed);
        let left = part(0..a).merge(part(a..b)).merge(part(b..40));
        let right = part(0..a).merge(part(a..b).merge(part(b..40)));
        let whole = part(0..40);
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.samples, whole.samples);
        prop_assert_eq!(left.violations, whole.violations);
        prop_assert_eq!(left.worst_margin, whole.worst_margin);
        prop_assert_eq!(left.witness_index, whole.witness_index);
    }

    #[test]
    fn scalar_product_bound(eps in prop::collection::vec(0.0..1.0f64, 1..12)) {
        let total: f64 = eps.iter().sum();
        let eps: Vec<f64> = eps.iter().map(|e| e * 0.5 / total.max(0.5)).collect();
        let mut prod = 1.0;
        for e in &eps {
            prod *= 1.0 + e;
        }
        prop_assert!(prod - 1.0 <= 2.0 * eps.iter().sum::<f64>() + 1e-15);
        prop_assert!(muconvex::product_bound_slack(&eps) >= -1e-15);
    }
}

#[test]
fn abelian_probe_with_o_equal_u_passes() {
    let g = make_group("abelian(3)").unwrap();
    let u = Seminorm::Euclidean;
    let r = mu_convex_probe(&g, &u, &u, 6, 2000, 1).unwrap();
    assert!(r.passed(), "{}", r.summary());
    assert!(r.worst_margin <= 1e-12);
}

#[test]
fn unit_group_probe_fails_with_too_small_o() {
    // o = u/2 does not dominate u, which is rejected up front
    let g = make_group("unit_group(2)").unwrap();
    let u = g.operator_seminorm();
    assert!(mu_convex_probe(&g, &u, &u.clone().scaled(0.5), 4, 100, 1).is_err());
    let r = mu_convex_probe(&g, &u, &u.clone().scaled(2.0), 8, 2000, 1).unwrap();
    assert!(r.passed(), "{}", r.summary());
}
