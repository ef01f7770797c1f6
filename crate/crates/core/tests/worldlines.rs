use horizon_spin::geometry::{areal_radius, metric_at, NEWTON_MAX_ITERATIONS};
use horizon_spin::kinematics::*;
use horizon_spin::Error;
use proptest::prelude::*;

/// Exact coordinate time of radial infall at constant `α` from `r0` with `t(r0) = 0`.
fn exact_t(r0: f64, r: f64, alpha: f64) -> f64 {
    (1.0 / alpha.tanh()) * ((r0 - r) + 2.0 * ((r0 - 2.0) / (r - 2.0)).ln())
}

#[test]
fn integrated_trajectories_stay_normalized() {
    for &(r0, r1, alpha) in &[
        (6.0, 2.2, 1.0),
        (20.0, 2.5, 2.0),
        (10.0, 3.0, 2.5),
        (8.0, 2.1, 0.8),
        (60.0, 50.0, 0.5),
    ] {
        let w = integrate_worldline(r0, r1, alpha, 1.0, 800).unwrap();
        assert_eq!(w.len(), 801);
        assert_eq!(w.last().unwrap().r(), r1);
        for s in &w {
            assert!(s.normalization_defect() < 1e-8);
            assert!(s.local_normalization_defect() < 1e-8);
            let g = metric_at(&s.point);
            assert!((g.inner(&s.velocity, &s.velocity) + 1.0).abs() < 1e-8);
            assert!(s.kruskal_x > s.kruskal_t.abs());
        }
    }
}

#[test]
fn coordinate_time_converges_at_fourth_order() {
    let (r0, r1, alpha) = (6.0, 2.2, 1.0);
    let err =
        |n| (integrate_worldline(r0, r1, alpha, 1.0, n).unwrap().last().unwrap().t() - exact_t(r0, r1, alpha)).abs();
    let ratio = err(50) / err(100);
    assert!((12.0..20.0).contains(&ratio), "{ratio}");
}

#[test]
fn proper_time_is_increasing_and_t_tracks_the_closed_form() {
    let w = integrate_worldline(6.0, 2.2, 1.0, 1.0, 2000).unwrap();
    for pair in w.windows(2) {
        assert!(pair[1].proper_time > pair[0].proper_time);
        assert!(pair[1].kruskal_t > pair[0].kruskal_t);
    }
    for s in &w {
        assert!((s.t() - exact_t(6.0, s.r(), 1.0)).abs() < 1e-8 * s.t().abs().max(1.0));
        assert!((s.beta - (1.0 + s.t() / 4.0)).abs() < 1e-14 * s.beta);
    }
}

#[test]
fn late_times_lose_the_kruskal_exterior() {
    // t/4M ≈ 44 at the end: X − |T| underflows relative to X.
    assert!(matches!(
        integrate_worldline(40.0, 2.05, 0.3, 1.0, 800),
        Err(Error::Step {
            quantity: "X − |T|",
            ..
        })
    ));
}

#[test]
fn unrepresentable_start_reports_first_sample() {
    assert!(matches!(
        integrate_worldline(1e6, 1e6 - 10.0, 1e-6, 1.0, 10),
        Err(Error::Step { index: 0, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn coordinate_round_trip(r in 2.01f64..600.0, t in -10.0f64..10.0) {
        let (big_t, big_x) = kruskal_from_schwarzschild(t, r, 1.0).unwrap();
        let (t2, r2) = schwarzschild_from_kruskal(big_t, big_x, 1.0).unwrap();
        prop_assert!((r2 - r).abs() <= 1e-9 * r);
        prop_assert!((t2 - t).abs() <= 1e-9 * t.abs().max(1.0));
        let w = big_x * big_x - big_t * big_t;
        prop_assert!(areal_radius(w, 1.0).unwrap().iterations <= NEWTON_MAX_ITERATIONS);
    }

    #[test]
    fn k_forms_agree(alpha in 1e-8f64..5.0, m in 0.1f64..10.0) {
        let a = MomentumState::from_rapidity(alpha, m).unwrap();
        let b = momentum_state(m * alpha.cosh(), m).unwrap();
        prop_assert!(a.k < 1.0);
        if alpha > 1e-3 {
            prop_assert!((a.k - b.k).abs() < 1e-9 * a.k);
        }
    }
}
