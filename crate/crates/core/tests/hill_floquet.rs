use std::f64::consts::{FRAC_PI_4, PI, TAU};

use loschmidt::hill::*;
use loschmidt::{Complex64, Error};
use proptest::prelude::*;

fn inverted_data() -> InitialPhaseData {
    let s = 0.5 * 2f64.ln();
    InitialPhaseData::new(s, 0.0, -FRAC_PI_4, s).unwrap()
}

#[test]
fn coefficient_evaluation() {
    let flat = CoefficientSpec::mathieu(1.0, 0.0, 1.0).unwrap();
    assert_eq!(flat.eval(17.3), 1.0);
    let inverted = CoefficientSpec::constant(-1.0, 1.0).unwrap();
    assert_eq!(inverted.eval(-4.2), -1.0);
    let m = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    assert_eq!(m.eval(0.0), 2.5);
    assert!(CoefficientSpec::mathieu(2.0, 0.5, 0.0).is_err());
    assert!(CoefficientSpec::constant(1.0, -1.0).is_err());
}

#[test]
fn circular_solution_phase_is_time() {
    let spec = CoefficientSpec::constant(1.0, TAU).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&spec, &init, 4.0 * PI, 0.01).unwrap();
    for (i, &t) in traj.times().iter().enumerate() {
        assert!(traj.u()[i].abs() < 1e-11, "u at {t}");
        assert!((traj.theta()[i] - t).abs() < 1e-10, "theta at {t}");
    }
    assert!((traj.phase_increment(PI).unwrap() - PI).abs() < 1e-10);
    assert_eq!(traj.phase_increment(0.0).unwrap(), 0.0);
}

#[test]
fn inverted_amplitude_is_half_log_cosh() {
    // z = cosh t + i sinh t, |z|^2 = cosh 2t.
    let spec = CoefficientSpec::constant(-1.0, 1.0).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_symmetric(&spec, &init, 4.0, 0.01).unwrap();
    for (i, &t) in traj.times().iter().enumerate() {
        let expected = 0.5 * (2.0 * t).cosh().ln();
        assert!((traj.u()[i] - expected).abs() < 1e-10, "t={t}");
        let phase = 0.5 * (2.0 * t).tanh().asin();
        assert!((traj.theta()[i] - phase).abs() < 1e-10, "t={t}");
    }
}

#[test]
fn inverted_phase_on_both_routes() {
    let spec = CoefficientSpec::constant(-1.0, 0.25).unwrap();
    let traj = integrate_symmetric(&spec, &inverted_data(), 6.0, 0.01).unwrap();
    for &t in traj.times() {
        let exact = (2.0 * t).exp().atan() - FRAC_PI_4;
        assert!((traj.phase_increment(t).unwrap() - exact).abs() < 1e-8);
        assert!((traj.phase_increment_quadrature(t).unwrap() - exact).abs() < 1e-8);
    }
    assert!(traj.route_discrepancy() < 1e-8);
    // Off-grid interpolation.
    let t: f64 = 0.123_456;
    let exact = (2.0 * t).exp().atan() - FRAC_PI_4;
    assert!((traj.phase_increment(t).unwrap() - exact).abs() < 1e-8);
}

#[test]
fn initial_sample_is_verbatim() {
    let spec = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    let init = InitialPhaseData::new(0.3, -0.7, 1.1, 0.05).unwrap();
    for horizon in [5.0, -5.0, 0.0] {
        let traj = integrate_complex_hill(&spec, &init, horizon, 0.05).unwrap();
        let o = traj.origin();
        assert_eq!(traj.times()[o], 0.0);
        assert_eq!(traj.u()[o], init.u0);
        assert_eq!(traj.udot()[o], init.udot0);
        assert_eq!(traj.theta()[o], init.theta0);
        assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
    }
    let single = integrate_complex_hill(&spec, &init, 0.0, 0.05).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn mathieu_wronskian_over_hundred_periods() {
    let spec = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&spec, &init, 100.0 * spec.period(), 0.05).unwrap();
    assert!(wronskian_drift(&traj) <= 1e-9, "{}", wronskian_drift(&traj));
    assert!(traj.theta().windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn amplitude_equation_residual_is_second_order() {
    let spec = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let res = |step: f64| {
        integrate_complex_hill(&spec, &init, 10.0 * spec.period(), step)
            .unwrap()
            .u_equation_residual()
    };
    let ratio = res(0.05) / res(0.025);
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn monodromy_against_direct_integration() {
    // Reference monodromy traces from an independent DOP853 run at rtol 1e-13.
    let cases = [
        (2.0, 0.5, 2.0, -0.599_234_795_988_104_3, Stability::Stable),
        (1.0, 0.5, 2.0, -2.153_935_443_534_799_7, Stability::Unstable),
        (0.25, 0.5, 1.0, -4.396_667_734_798_678, Stability::Unstable),
    ];
    for (gamma, delta, omega, trace, class) in cases {
        let spec = CoefficientSpec::mathieu(gamma, delta, omega).unwrap();
        let report = monodromy(&spec).unwrap();
        assert!((report.trace - trace).abs() < 1e-9, "{gamma}: {}", report.trace);
        assert!((report.determinant - 1.0).abs() < 1e-9);
        assert_eq!(report.stability, class);
        if class == Stability::Unstable {
            let mult = report.multipliers.iter().map(|m| m.norm()).fold(0.0, f64::max);
            assert!((report.lyapunov - mult.ln() / report.period).abs() < 1e-12);
            assert!(report.lyapunov > 0.0);
        } else {
            assert_eq!(report.lyapunov, 0.0);
        }
    }
}

#[test]
fn monodromy_constant_cases() {
    let r = monodromy(&CoefficientSpec::constant(2.0, TAU).unwrap()).unwrap();
    assert!((r.trace - 2.0 * (TAU * 2f64.sqrt()).cos()).abs() < 1e-9);
    assert_eq!(r.stability, Stability::Stable);
    let r = monodromy(&CoefficientSpec::constant(-1.0, TAU).unwrap()).unwrap();
    assert!((r.trace - 2.0 * TAU.cosh()).abs() < 1e-9 * TAU.cosh());
    assert_eq!(r.stability, Stability::Unstable);
    assert!((r.lyapunov - 1.0).abs() < 1e-9);
    let r = monodromy(&CoefficientSpec::constant(1.0, TAU).unwrap()).unwrap();
    assert_eq!(r.stability, Stability::Marginal);
}

#[test]
fn theta_growth_classes() {
    let inverted = CoefficientSpec::constant(-1.0, 0.25).unwrap();
    let traj = integrate_symmetric(&inverted, &inverted_data(), 6.0, 0.01).unwrap();
    let growth = classify_theta_growth(&traj).unwrap();
    assert_eq!(growth.class(), GrowthClass::Saturating);
    assert!((growth.delta_plus().unwrap() - FRAC_PI_4).abs() < 1e-6);
    assert!((growth.delta_minus().unwrap() + FRAC_PI_4).abs() < 1e-6);

    let circle = CoefficientSpec::constant(1.0, PI).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&circle, &init, 30.0 * PI, 0.05).unwrap();
    assert_eq!(classify_theta_growth(&traj).unwrap().class(), GrowthClass::Unbounded);

    let mathieu = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    let traj = integrate_complex_hill(&mathieu, &init, 40.0 * mathieu.period(), 0.05).unwrap();
    assert_eq!(classify_theta_growth(&traj).unwrap().class(), GrowthClass::Unbounded);
}

#[test]
fn fixed_step_order_matches_nominal() {
    let spec = CoefficientSpec::constant(1.0, TAU).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let err = |step: f64| {
        let traj = integrate_complex_hill_with(&spec, &init, 6.0, step, &HillOptions::fixed()).unwrap();
        (0..traj.len())
            .map(|i| (traj.x(i) - Complex64::from_polar(1.0, traj.times()[i])).norm())
            .fold(0.0, f64::max)
    };
    let slope = (err(0.2) / err(0.1)).log2();
    assert!((slope - loschmidt::ode::ORDER as f64).abs() < 0.2, "slope {slope}");
}

#[test]
fn coarse_fixed_step_reports_refine() {
    let spec = CoefficientSpec::constant(1.0, TAU).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let res = integrate_complex_hill_with(&spec, &init, 10.0, 2.0, &HillOptions::fixed());
    assert!(matches!(res, Err(Error::StepTooCoarse { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mathieu_is_periodic(gamma in -3.0f64..3.0, delta in -2.0f64..2.0, omega in 0.2f64..5.0, t in -50.0f64..50.0) {
        let spec = CoefficientSpec::mathieu(gamma, delta, omega).unwrap();
        let a = spec.eval(t);
        let b = spec.eval(t + spec.period());
        prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn wronskian_and_monotone_phase(
        gamma in 0.5f64..3.0,
        delta in 0.0f64..1.0,
        u0 in -0.5f64..0.5,
        udot0 in -1.0f64..1.0,
        eps in -0.3f64..0.3,
    ) {
        let spec = CoefficientSpec::mathieu(gamma, delta, 2.0).unwrap();
        prop_assume!(monodromy(&spec).unwrap().stability == Stability::Stable);
        let init = InitialPhaseData::new(u0, udot0, 0.0, eps).unwrap();
        let traj = integrate_complex_hill(&spec, &init, 10.0 * spec.period(), 0.05).unwrap();
        prop_assert!(wronskian_drift(&traj) < 1e-9);
        prop_assert!(traj.theta().windows(2).all(|w| w[1] > w[0]));
        prop_assert!(traj.route_discrepancy() < 1e-8);
    }

    #[test]
    fn monodromy_is_symplectic(gamma in -1.0f64..4.0, delta in 0.0f64..2.0, omega in 0.5f64..3.0) {
        let spec = CoefficientSpec::mathieu(gamma, delta, omega).unwrap();
        let r = monodromy(&spec).unwrap();
        prop_assert!((r.determinant - 1.0).abs() < 1e-9 * r.trace.abs().max(1.0).powi(2));
        match r.stability {
            Stability::Stable => prop_assert!(r.trace.abs() < 2.0),
            Stability::Unstable => prop_assert!(r.trace.abs() > 2.0),
            Stability::Marginal => prop_assert!((r.trace.abs() - 2.0).abs() <= MARGINAL_BAND),
        }
    }
}
