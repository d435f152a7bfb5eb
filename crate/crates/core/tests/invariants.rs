//! Property tests for invariants that cut across modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use latticegate::atomics::{clebsch_gordan, spherical_bessel_derivative, spherical_bessel_orders};
use latticegate::dipole_kernel::{fg, RelativePosition};
use latticegate::ensemble::{run_protocol, simulate_fill};
use latticegate::format::{round9, sig9};
use latticegate::gate::{evolve_pulse, truth_table, GateEnvironment, PulseSpec, TwoQubitState};
use latticegate::lattice::well_separation;
use latticegate::overlap::{kappa_approx, mean_fg, QuadratureSpec, TrapGeometry};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cooperativity_is_bounded(kr in 1e-6f64..100.0, c in -1.0f64..=1.0) {
        let (_, g) = fg(RelativePosition::new(kr, c).unwrap());
        prop_assert!(g.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn wronskian(log_x in -3.0f64..2.0, n in 0usize..3) {
        let x = 10f64.powf(log_x);
        let o = spherical_bessel_orders(x).unwrap();
        let (dj, dy) = spherical_bessel_derivative(n, x).unwrap();
        let w = o.j[n] * dy - dj * o.y[n];
        prop_assert!((w * x * x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cg_columns_are_normalized(two_f in 1i32..12, m_index in 0i32..12, q in -1i32..=1) {
        let f = two_f as f64 / 2.0;
        let m = -f + (m_index % (two_f + 1)) as f64;
        let mut total = 0.0;
        let mut fp = (f - 1.0).abs();
        while fp <= f + 1.0 + 1e-9 {
            if (m + q as f64).abs() <= fp + 1e-9 {
                total += clebsch_gordan(f, m, q, fp).unwrap().powi(2);
            }
            fp += 1.0;
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separation_is_monotone_and_antisymmetric(a in 0.0f64..=PI, b in 0.0f64..=PI) {
        let k = 2.0 * PI / 852e-9;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(well_separation(lo, k).unwrap() <= well_separation(hi, k).unwrap());
        let sum = well_separation(a, k).unwrap() + well_separation(PI - a, k).unwrap();
        prop_assert!((sum * k - PI).abs() < 1e-12);
    }

    #[test]
    fn closed_form_sign_follows_aspect_ratio(p in 0.02f64..0.5, r in 0.2f64..5.0) {
        let a = (p * r).min(1.0);
        let k = kappa_approx(TrapGeometry::new(p, a).unwrap());
        if r > 1.01 && a > p * 1.01 {
            prop_assert!(k > 0.0);
        } else if r < 0.99 {
            prop_assert!(k < 0.0);
        }
    }

    #[test]
    fn decay_free_pulses_conserve_norm(
        shift in -1e5f64..1e5,
        rabi in 1.0f64..1e4,
        detuning in -1e4f64..1e4,
        t in 0.0f64..1e-2,
        input in 0usize..4,
    ) {
        let env = GateEnvironment::decay_free(shift).unwrap();
        let out = evolve_pulse(
            &TwoQubitState::basis(input),
            &PulseSpec::new(rabi, detuning, t).unwrap(),
            &env,
        )
        .unwrap();
        prop_assert!((out.populations().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(out.leaked, 0.0);
    }

    #[test]
    fn sig9_round_trips_through_round9(x in -1e12f64..1e12, e in -20i32..20) {
        let v = x * 10f64.powi(e);
        prop_assert_eq!(sig9(v).parse::<f64>().unwrap(), round9(v));
        prop_assert_eq!(round9(round9(v)), round9(v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn overlap_averages_stay_in_range(p in 0.03f64..0.6, a in 0.03f64..0.6) {
        let e = mean_fg(TrapGeometry::new(p, a).unwrap(), &QuadratureSpec::default()).unwrap();
        prop_assert!(e.mean_g > 0.0 && e.mean_g <= 1.0);
        prop_assert!(e.err_f >= 0.0 && e.err_g >= 0.0);
        if (p - a).abs() < 1e-12 {
            prop_assert!((e.mean_g - (-p * p).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn full_fill_needs_no_correction(seed in 0u64..1000) {
        let env = GateEnvironment::new(2.0e4, 50.0, 60.0).unwrap();
        let table = truth_table(&env, &PulseSpec::operating_point(&env, 10.0).unwrap()).unwrap();
        let fill = simulate_fill(2000, 1.0, seed).unwrap();
        let run = run_protocol(&fill, &table, 0, seed).unwrap();
        prop_assert_eq!(run.corrected.populations, run.stages[0].fractions());
        prop_assert_eq!(run.true_paired_fraction, 1.0);
    }
}
