//! Scalar DE, thresholds and landscape checked against independent
//! closed-form evaluations for regular ensembles.

use proptest::prelude::*;
use scwd_core::scalar::DEFAULT_GRID_N;
use scwd_core::UncoupledEnsemble;

/// Hand-written DE and potential for the regular `(dv, dc)` ensemble.
#[derive(Clone, Copy)]
struct Regular {
    dv: i32,
    dc: i32,
}

impl Regular {
    fn step(self, x: f64, eps: f64) -> f64 {
        eps * (1.0 - (1.0 - x).powi(self.dc - 1)).powi(self.dv - 1)
    }

    fn potential(self, x: f64, eps: f64) -> f64 {
        let (dv, dc) = (self.dv as f64, self.dc as f64);
        (1.0 - (1.0 - x).powi(self.dc)) / dc
            - x * (1.0 - x).powi(self.dc - 1)
            - eps / dv * (1.0 - (1.0 - x).powi(self.dc - 1)).powi(self.dv)
    }

    fn limit(self, eps: f64) -> f64 {
        let mut x = 1.0;
        for _ in 0..200_000 {
            let next = self.step(x, eps);
            if (x - next).abs() < 1e-13 {
                return next;
            }
            x = next;
        }
        x
    }

    /// Brute-force scan on an ε grid of the given step: the last ε whose DE
    /// limit is below 1e-9, and the first ε whose stuck fixed point has a
    /// negative potential.
    fn scan_thresholds(self, lo: f64, hi: f64, step: f64) -> (f64, f64) {
        let n = ((hi - lo) / step).round() as usize;
        let grid = (0..=n).map(|i| lo + i as f64 * step);
        let mut bp = lo;
        let mut map = None;
        for eps in grid {
            let x = self.limit(eps);
            if x < 1e-9 {
                bp = eps;
            } else if map.is_none() && self.potential(x, eps) < 0.0 {
                map = Some(eps);
            }
        }
        (bp, map.expect("scan range must cover the MAP threshold"))
    }
}

const R36: Regular = Regular { dv: 3, dc: 6 };
const R48: Regular = Regular { dv: 4, dc: 8 };

fn ens(r: Regular) -> UncoupledEnsemble {
    UncoupledEnsemble::regular(r.dv as usize, r.dc as usize).unwrap()
}

#[test]
fn values_at_half_match_rationals() {
    let e = ens(R36);
    // rational values at x = 0.5, eps = 0.475
    assert!((e.de_step(0.5, 0.475) - 0.445_776_367_187_5).abs() < 1e-15);
    assert!((e.potential(0.5, 0.475) - 0.004_488_881_429_036_458).abs() < 1e-15);
    assert!((e.potential_d1(0.5, 0.475) - 0.016_944_885_253_906_25).abs() < 1e-15);
    assert!((e.potential_d2(0.5, 0.475) - 0.087_066_650_390_625).abs() < 1e-15);
}

#[test]
fn potential_matches_closed_form() {
    for r in [R36, R48] {
        let e = ens(r);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            for eps in [0.3, 0.45, 0.49] {
                assert!((e.potential(x, eps) - r.potential(x, eps)).abs() < 1e-14);
                assert!((e.de_step(x, eps) - r.step(x, eps)).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn potential_at_one_is_one_sixth_minus_eps_over_three() {
    let e = ens(R36);
    for eps in [0.0, 0.42, 0.465, 0.475, 1.0] {
        assert!((e.potential(1.0, eps) - (1.0 / 6.0 - eps / 3.0)).abs() < 1e-15);
    }
}

#[test]
fn thresholds_agree_with_brute_force_scan() {
    const STEP: f64 = 1e-4;
    for (r, bp_ref, map_ref) in [
        (R36, 0.429_439_814_419_49, 0.488_150_884_191_57),
        (R48, 0.383_446_572_321_74, 0.497_740_862_925_54),
    ] {
        let e = ens(r);
        let bp = e.bp_threshold(1e-10).unwrap();
        let map = e.map_threshold(1e-10).unwrap();
        assert!((bp - bp_ref).abs() < 1e-8, "bp {bp}");
        assert!((map - map_ref).abs() < 1e-8, "map {map}");
        let (bp_scan, map_scan) = r.scan_thresholds(0.35, 0.5, STEP);
        assert!(
            bp_scan <= bp && bp < bp_scan + STEP + 1e-9,
            "bp {bp} vs scan {bp_scan}"
        );
        assert!(
            map_scan - STEP - 1e-9 < map && map <= map_scan,
            "map {map} vs scan {map_scan}"
        );
    }
}

#[test]
fn bp_threshold_sits_between_decoding_and_stuck() {
    let e = ens(R36);
    let bp = e.bp_threshold(1e-8).unwrap();
    assert!(e.de_run(bp - 1e-4, 1e-12, 100_000).limit < 1e-9);
    assert!(e.de_run(bp + 1e-4, 1e-12, 100_000).limit > 0.1);
}

#[test]
fn landscape_at_0475_matches_reference_points() {
    let l = ens(R36).landscape(0.475, DEFAULT_GRID_N).unwrap();
    let close = |got: Option<f64>, want: f64| (got.unwrap() - want).abs() < 1e-9;
    assert!(close(l.x_a, 0.051_322_551_391_473_1));
    assert!(close(l.x_b, 0.157_936_985_169_515));
    assert!(close(l.x_c0, 0.251_268_002_114_958));
    assert!(close(l.x_d, 0.408_943_599_561_621));
    assert!(close(l.x_e, 0.548_323_559_664_042));
    let (a, b, c0, d, e) = (
        l.x_a.unwrap(),
        l.x_b.unwrap(),
        l.x_c0.unwrap(),
        l.x_d.unwrap(),
        l.x_e.unwrap(),
    );
    assert!(0.0 < a && a < b && b < c0 && c0 < d && d < e && e < 1.0);
    // sup |U''| on (0, x_d) is approached as x -> 0, where U'' -> ρ'(1)(1 - 0) = 5
    assert!((l.d.unwrap() - 5.0).abs() < 1e-6);
    assert_eq!(l.grid.len(), DEFAULT_GRID_N);
    assert_eq!(l.grid[0].x, 0.0);
    assert_eq!(l.grid.last().unwrap().x, 1.0);
}

#[test]
fn landscape_at_0465_matches_reference_points() {
    let e = ens(R36);
    let l = e.landscape(0.465, DEFAULT_GRID_N).unwrap();
    assert!((l.x_b.unwrap() - 0.167_584_263_870_729).abs() < 1e-9);
    assert!((l.x_d.unwrap() - 0.389_437_449_785_127).abs() < 1e-9);
    assert!((l.x_a.unwrap() - 0.052_688_635_923_096_7).abs() < 1e-9);
    assert!((l.x_c0.unwrap() - 0.252_889_613_637_18).abs() < 1e-9);
    assert!((e.potential(l.x_b.unwrap(), 0.465) - 0.010_704_410_2).abs() < 1e-9);
    assert!((e.potential(l.x_d.unwrap(), 0.465) - 0.006_190_705_9).abs() < 1e-9);
}

#[test]
fn map_fixed_point_has_zero_potential() {
    let e = ens(R36);
    let map = e.map_threshold(1e-10).unwrap();
    let x = e.de_run(map, 1e-13, 1_000_000).limit;
    assert!((x - 0.432_262_639_059_32).abs() < 1e-6);
    assert!(e.potential(x, map).abs() < 1e-9);
}

#[test]
fn stationary_points_are_de_fixed_points() {
    let e = ens(R36);
    for eps in [0.44, 0.46, 0.475, 0.485] {
        let l = e.landscape(eps, DEFAULT_GRID_N).unwrap();
        for &x in &l.stationary_points {
            assert!((e.de_step(x, eps) - x).abs() < 1e-9, "eps {eps} x {x}");
        }
        let stuck = e.de_run(eps, 1e-14, 1_000_000).limit;
        assert!((stuck - l.x_d.unwrap()).abs() < 1e-9, "eps {eps}");
    }
}

proptest! {
    #[test]
    fn analytic_derivatives_match_finite_differences(x in 0.05f64..0.95, eps in 0.0f64..1.0) {
        let e = ens(R36);
        let h = 1e-6;
        let d1 = e.potential_d1(x, eps);
        let fd1 = (e.potential(x + h, eps) - e.potential(x - h, eps)) / (2.0 * h);
        prop_assert!((fd1 - d1).abs() <= 1e-7 * d1.abs() + 1e-9, "U' {} vs {}", d1, fd1);
        let d2 = e.potential_d2(x, eps);
        let fd2 = (e.potential_d1(x + h, eps) - e.potential_d1(x - h, eps)) / (2.0 * h);
        prop_assert!((fd2 - d2).abs() <= 1e-5 * d2.abs() + 1e-9, "U'' {} vs {}", d2, fd2);
    }

    #[test]
    fn potential_vanishes_at_origin(eps in 0.0f64..1.0, dv in 2usize..6, dc in 3usize..12) {
        let e = UncoupledEnsemble::regular(dv, dc).unwrap();
        prop_assert_eq!(e.potential(0.0, eps), 0.0);
    }

    #[test]
    fn de_iterates_never_increase(eps in 0.0f64..1.0) {
        let e = ens(R48);
        let mut x = 1.0;
        for _ in 0..200 {
            let next = e.de_step(x, eps);
            prop_assert!(next <= x);
            x = next;
        }
    }
}
