//! Speed measurement, steady state and the two speed bounds.

use proptest::prelude::*;
use scwd_core::scalar::DEFAULT_GRID_N;
use scwd_core::speed::{
    bound_a1, bound_th2, detect_steady_state, lemma_b1_check, measure_speed, Th2Options,
    Th2Subtrahend, Th2Variant,
};
use scwd_core::window::run_wd;
use scwd_core::{
    CoupledPotentialContext, CoupledSpec, RecordPolicy, RunOptions, SpeedOptions,
    UncoupledEnsemble, WindowSchedule,
};

fn spec(n: usize, w: usize, eps: f64) -> CoupledSpec {
    CoupledSpec::new(UncoupledEnsemble::regular(3, 6).unwrap(), n, w, eps).unwrap()
}

#[test]
fn speed_is_non_decreasing_in_window_size() {
    let sp = spec(100, 4, 0.465);
    let opts = SpeedOptions::reproduction();
    let ts: Vec<usize> = [12, 14, 16, 18]
        .iter()
        .map(|&w| measure_speed(&sp, w, 40, &opts).unwrap().t_min.unwrap())
        .collect();
    assert!(ts.windows(2).all(|p| p[1] <= p[0]), "{ts:?}");
}

#[test]
fn speed_is_a_non_increasing_staircase_in_epsilon() {
    let mut opts = SpeedOptions::reproduction();
    opts.bounds = false;
    let mut last = f64::INFINITY;
    for eps in [0.43, 0.45, 0.46, 0.47, 0.48] {
        let r = measure_speed(&spec(100, 4, eps), 15, 200, &opts).unwrap();
        let v = r.v().unwrap();
        assert_eq!(v, 1.0 / r.t_min.unwrap() as f64);
        assert!(v <= last, "eps {eps}");
        last = v;
    }
}

#[test]
fn a1_is_reproducible_from_a_fresh_run() {
    let sp = spec(100, 4, 0.465);
    let opts = SpeedOptions::reproduction();
    let first = measure_speed(&sp, 12, 40, &opts).unwrap();
    let second = measure_speed(&sp, 12, 40, &opts).unwrap();
    assert_eq!(first, second);
    let a1 = first.a1.unwrap();
    let sched = WindowSchedule::new(12, first.t_min.unwrap()).unwrap();
    let run = run_wd(
        &sp,
        &sched,
        &opts
            .run
            .clone()
            .recording(RecordPolicy::Windows(a1.c..=a1.c + 1)),
    )
    .unwrap();
    let ctx = CoupledPotentialContext::new(&sp, sched, a1.c).unwrap();
    assert_eq!(
        bound_a1(run.trajectory.as_ref().unwrap(), &ctx).unwrap(),
        a1.value
    );
}

#[test]
fn a1_bounds_speed_where_steady_state_is_reached() {
    let mut checked = 0;
    for eps in [0.40, 0.425, 0.465] {
        let sp = spec(100, 4, eps);
        for w in [12, 15] {
            let r = measure_speed(&sp, w, 200, &SpeedOptions::reproduction()).unwrap();
            if let Some(holds) = r.a1_bounds_speed() {
                assert!(holds, "{r}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn wave_settles_and_satisfies_the_profile_margin() {
    let sp = spec(100, 3, 0.42);
    let sched = WindowSchedule::new(11, 6).unwrap();
    let run = run_wd(
        &sp,
        &sched,
        &RunOptions::literal().recording(RecordPolicy::AllWindows),
    )
    .unwrap();
    let traj = run.trajectory.unwrap();
    let steady = detect_steady_state(&traj, &sp, &sched, 1e-9).unwrap();
    assert!(steady.residual <= 1e-9);
    // the shift identity tightens monotonically, so a looser tolerance settles earlier
    let loose = detect_steady_state(&traj, &sp, &sched, 1e-6).unwrap();
    assert!(loose.c_prime <= steady.c_prime);
    let lemma = lemma_b1_check(
        traj.state(steady.c_prime, 0).unwrap(),
        steady.c_prime,
        &sp,
        &sched,
    );
    assert!(lemma.holds, "{lemma:?}");
}

#[test]
fn critical_point_bound_identity_and_monotonicity() {
    let sp = spec(100, 4, 0.465);
    let landscape = sp.ensemble().landscape(0.465, DEFAULT_GRID_N).unwrap();
    let mut last_b1 = f64::NEG_INFINITY;
    for w in [5, 10, 15, 20, 40] {
        let b = bound_th2(&sp, w, &landscape, 1.0, Th2Options::default()).unwrap();
        assert!((b.b1 - (b.b2 - b.width_term)).abs() < 1e-12);
        assert!(b.b1 >= last_b1);
        last_b1 = b.b1;
        assert_eq!(b.finite_valid(), b.b1 > 0.0);
        if let (Some(fin), Some(inf)) = (b.finite_w, b.infinite_w) {
            assert!(fin >= inf);
        }
    }
    let with_xe = bound_th2(
        &sp,
        15,
        &landscape,
        1.0,
        Th2Options {
            variant: Th2Variant::Derivation,
            subtrahend: Th2Subtrahend::XE,
        },
    )
    .unwrap();
    let u = |x: f64| sp.ensemble().potential(x, 0.465);
    let want = 4.0 * (u(1.0) - u(landscape.x_e.unwrap())) / with_xe.b2;
    assert!((with_xe.infinite_w.unwrap() - want).abs() < 1e-12);
}

#[test]
fn critical_point_bound_needs_critical_points() {
    let sp = spec(100, 4, 0.3);
    let landscape = sp.ensemble().landscape(0.3, DEFAULT_GRID_N).unwrap();
    assert!(bound_th2(&sp, 15, &landscape, 1.0, Th2Options::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lemma_margin_grows_with_coupling_width(profile in prop::collection::vec(0.0f64..1.0, 60), c in 1usize..=40) {
        let mut x = profile;
        x.sort_by(f64::total_cmp);
        let sched = WindowSchedule::new(10, 2).unwrap();
        let mut last = f64::NEG_INFINITY;
        for w in [1usize, 2, 3, 5, 8] {
            let sp = spec(61 - w, w, 0.45);
            let m = lemma_b1_check(&x, c, &sp, &sched).min_margin;
            prop_assert!(m >= last - 1e-15);
            last = m;
        }
    }
}
