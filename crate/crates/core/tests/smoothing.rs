use prodint_core::evolution::{self, EvolveConfig, Scheme};
use prodint_core::group::make_group;
use prodint_core::smoothing::{self, MackeySchedule};
use prodint_core::{linalg, random};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn smoothing_keeps_the_product_integral(seed in any::<u64>(), pieces in 2usize..5, constant in any::<bool>()) {
        let g = make_group("so3").unwrap();
        let mut rng = random::rng(seed);
        let pw = random::piecewise_curve(&mut rng, 3, 0.0, 1.0, pieces, constant, 0.8).unwrap();
        let psi = smoothing::smooth_piecewise(&pw).unwrap();
        let cfg = EvolveConfig::new(Scheme::Midpoint, 1.0 / 128.0);
        let rough = evolution::evolve_piecewise(&g, &pw, &cfg).unwrap();
        let smooth = evolution::evolve(&g, &psi, &cfg).unwrap();
        let d = g.chart_distance(&rough.endpoint, &smooth.endpoint).value;
        prop_assert!(d <= (5.0 * (rough.error_estimate + smooth.error_estimate)).max(1e-12), "{d}");
        prop_assert!(smoothing::breakpoint_jumps(&pw, 4) <= 1e-8);
    }

    #[test]
    fn reparam_fixes_breakpoints_and_is_monotone(cuts in prop::collection::btree_set(1u32..99, 1..4)) {
        let mut bp = vec![0.0];
        bp.extend(cuts.iter().map(|&c| c as f64 / 100.0));
        bp.push(1.0);
        let rho = smoothing::reparam_profile(&bp).unwrap();
        for &b in &bp {
            prop_assert!((rho.eval(b)[0] - b).abs() <= 1e-12);
        }
        let mut prev = -1.0;
        for k in 0..=200 {
            let v = rho.eval(k as f64 / 200.0)[0];
            prop_assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}

#[test]
fn bump_profile_is_normalized() {
    let b = smoothing::bump();
    assert_eq!(b.value(0.0), 0.0);
    assert_eq!(b.value(1.0), 0.0);
    assert!(b.antiderivative(0.0).abs() < 1e-15);
    assert!((b.antiderivative(1.0) - 1.0).abs() < 1e-12);
    // symmetric about 1/2
    for t in [0.1, 0.27, 0.4] {
        assert!((b.value(t) - b.value(1.0 - t)).abs() < 1e-12);
    }
    // independent trapezoid integral of the profile
    let n = 20000;
    let trap: f64 = (0..n).map(|k| 0.5 * (b.value(k as f64 / n as f64) + b.value((k + 1) as f64 / n as f64)) / n as f64).sum();
    assert!((trap - 1.0).abs() < 1e-8, "{trap}");
}

#[test]
fn mackey_schedule_glues_to_the_sequence() {
    let g = make_group("so3").unwrap();
    assert_eq!(MackeySchedule::breakpoint(1), 0.5);
    assert_eq!(MackeySchedule::breakpoint(3), 0.875);
    let mut rng = random::rng(3);
    let g0 = g.exp(&[0.2, -0.1, 0.3]);
    let seq = MackeySchedule::decaying(&g, g0, 4, 1.0, &mut rng).unwrap();
    seq.check_decay(4, 1.0).unwrap();
    let phi = smoothing::mackey_glue(&seq, 4, 1.0).unwrap();
    let mut end = g.identity();
    for k in 1..=4 {
        let (a, b) = (MackeySchedule::breakpoint(k), MackeySchedule::breakpoint(k + 1));
        let mut cfg = EvolveConfig::new(Scheme::Midpoint, (b - a) / 128.0).without_estimate();
        cfg.max_steps = 1 << 20;
        let seg = phi.restrict(a, b).unwrap();
        end = g.mul(&evolution::evolve(&g, &seg, &cfg).unwrap().endpoint, &end);
    }
    let els = seq.elements();
    let want = g.quotient(&els[4], &els[0]);
    assert!(g.chart_distance(&end, &want).value < 1e-5);
    assert!(linalg::norm(seq.increment(1)) <= 0.5 + 1e-12);
}
