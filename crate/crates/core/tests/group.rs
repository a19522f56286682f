use prodint_core::group::make_group;
use prodint_core::{adjoint, linalg, random, GroupSpec};
use proptest::prelude::*;

const GROUPS: &[&str] = &["so3", "su2", "heisenberg3", "abelian(3)", "torus(2)", "unit_group(2)", "gl(2)"];

fn close(g: &GroupSpec, a: &prodint_core::GroupElement, b: &prodint_core::GroupElement, tol: f64) -> bool {
    linalg::norm(&linalg::sub(a.coords(), b.coords())) <= tol * (1.0 + linalg::norm(a.coords())) && g.chart_distance(a, b).value <= tol
}

fn diff(a: &[f64], b: &[f64]) -> f64 {
    linalg::norm(&linalg::sub(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn group_axioms(seed in any::<u64>(), idx in 0..GROUPS.len()) {
        let g = make_group(GROUPS[idx]).unwrap();
        let mut rng = random::rng(seed);
        let (a, b, c) = (g.random_near_identity(&mut rng, 0.4), g.random_near_identity(&mut rng, 0.4), g.random_near_identity(&mut rng, 0.4));
        let e = g.identity();
        prop_assert!(close(&g, &g.mul(&g.mul(&a, &b), &c), &g.mul(&a, &g.mul(&b, &c)), 1e-12));
        prop_assert!(close(&g, &g.mul(&e, &a), &a, 1e-14) && close(&g, &g.mul(&a, &e), &a, 1e-14));
        prop_assert!(close(&g, &g.mul(&a, &g.inv(&a)), &e, 1e-12));
        prop_assert!(close(&g, &g.quotient(&a, &b), &g.mul(&g.inv(&a), &b), 1e-12));
    }

    #[test]
    fn exp_log_round_trip(seed in any::<u64>(), idx in 0..GROUPS.len()) {
        let g = make_group(GROUPS[idx]).unwrap();
        let mut rng = random::rng(seed);
        let x = g.random_algebra(&mut rng, 0.3);
        // stay well inside the log chart
        let x = linalg::scale(&x, (0.4 * g.chart_radius() / linalg::norm(&x).max(1e-300)).min(1.0));
        let back = g.log(&g.exp(&x)).unwrap();
        prop_assert!(diff(&back, &x) <= 1e-10, "{:?} vs {:?}", back, x);
        // one-parameter subgroups
        let (s, t) = (0.3, -0.7);
        let lhs = g.mul(&g.exp(&linalg::scale(&x, s)), &g.exp(&linalg::scale(&x, t)));
        prop_assert!(close(&g, &lhs, &g.exp(&linalg::scale(&x, s + t)), 1e-12));
    }

    #[test]
    fn bracket_is_a_lie_bracket(seed in any::<u64>(), idx in 0..GROUPS.len()) {
        let g = make_group(GROUPS[idx]).unwrap();
        let mut rng = random::rng(seed);
        let (x, y, z) = (g.random_algebra(&mut rng, 1.0), g.random_algebra(&mut rng, 1.0), g.random_algebra(&mut rng, 1.0));
        prop_assert!(diff(&g.bracket(&x, &y), &linalg::scale(&g.bracket(&y, &x), -1.0)) <= 1e-12);
        let jacobi = linalg::add(&linalg::add(&g.bracket(&x, &g.bracket(&y, &z)), &g.bracket(&y, &g.bracket(&z, &x))), &g.bracket(&z, &g.bracket(&x, &y)));
        prop_assert!(linalg::norm(&jacobi) <= 1e-11);
        if g.is_abelian() {
            prop_assert_eq!(linalg::norm(&g.bracket(&x, &y)), 0.0);
        }
    }

    #[test]
    fn adjoint_is_a_representation(seed in any::<u64>(), idx in 0..GROUPS.len()) {
        let g = make_group(GROUPS[idx]).unwrap();
        let mut rng = random::rng(seed);
        let (a, b) = (g.random_near_identity(&mut rng, 0.5), g.random_near_identity(&mut rng, 0.5));
        let y = g.random_algebra(&mut rng, 1.0);
        prop_assert!(diff(&g.ad(&g.mul(&a, &b), &y), &g.ad(&a, &g.ad(&b, &y))) <= 1e-11);
        prop_assert!(diff(&g.ad(&g.identity(), &y), &y) <= 1e-14);
        // Ad_exp(X) = e^(ad_X)
        let x = g.random_algebra(&mut rng, 0.8);
        let series = adjoint::ad_series(&g, &x, &y, 1.0).unwrap();
        prop_assert!(diff(&g.ad(&g.exp(&x), &y), &series.value) <= 1e-10);
        if g.is_nilpotent() || g.is_abelian() {
            prop_assert!(series.nilpotent_exact);
        }
    }
}

#[test]
fn so3_exp_matches_rodrigues() {
    let g = GroupSpec::so3();
    let x = [0.3, -0.4, 1.2];
    let th = linalg::norm(&x);
    let k = [[0.0, -x[2], x[1]], [x[2], 0.0, -x[0]], [-x[1], x[0], 0.0]];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let k2: f64 = (0..3).map(|m| k[i][m] * k[m][j]).sum();
            r[i][j] = f64::from(u8::from(i == j)) + th.sin() / th * k[i][j] + (1.0 - th.cos()) / (th * th) * k2;
        }
    }
    // rotate a probe vector through the adjoint action
    let v = [1.0, 2.0, -0.5];
    let rotated = g.ad(&g.exp(&x), &v);
    let want: Vec<f64> = (0..3).map(|i| (0..3).map(|j| r[i][j] * v[j]).sum()).collect();
    assert!(diff(&rotated, &want) < 1e-14, "{rotated:?} vs {want:?}");
}

#[test]
fn unknown_groups_are_rejected() {
    for name in ["so4", "gl", "abelian(x)", "unit_group(2"] {
        assert!(make_group(name).is_err(), "{name}");
    }
}
