use std::f64::consts::{FRAC_PI_4, PI, TAU};

use loschmidt::fidelity::*;
use loschmidt::hill::*;
use loschmidt::states::*;
use loschmidt::{Complex64, Error};
use proptest::prelude::*;

fn two_term(alpha: f64, parity: Parity, n1: usize, n2: usize, p: f64) -> StateSpec {
    StateSpec::from_components(
        alpha,
        parity,
        vec![
            HermiteComponent { n: n1, amplitude: p.sqrt() },
            HermiteComponent { n: n2, amplitude: (1.0 - p).sqrt() },
        ],
    )
    .unwrap()
}

#[test]
fn rational_exponent_recurs_exactly() {
    // alpha = 5/2: exponents n - alpha are half-integers, period 4 pi.
    let spec = hermite_coefficients(2.5, Parity::Even, 80).unwrap();
    let f = fidelity_general(&spec, 2.0 * TAU).unwrap();
    assert!((f - 1.0).norm() < 1e-12);
    let half = fidelity_general(&spec, TAU).unwrap();
    assert!((half.norm() - 1.0).abs() < 1e-12);
    assert!((half + 1.0).norm() < 1e-12);
}

#[test]
fn two_term_lower_bound() {
    for p in [0.1, 0.25, 0.5, 0.8] {
        let spec = two_term(2.0, Parity::Even, 0, 4, p);
        let lb = lower_bound(&spec).unwrap();
        assert!((lb - (2.0 * p - 1.0).abs()).abs() < 1e-10, "p={p}: {lb}");
    }
}

#[test]
fn circular_curve_recurs_at_multiples_of_pi() {
    let spec = CoefficientSpec::constant(1.0, PI).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&spec, &init, 10.0 * PI, 0.01).unwrap();
    let curve = special_curve(&traj, SpecialState::PhiG1).unwrap();
    assert_eq!(curve.values[0], Complex64::new(1.0, 0.0));
    for (t, v) in curve.times.iter().zip(&curve.values) {
        assert!((v - fidelity_g1(*t)).norm() < 1e-9);
    }
    let report = detect_recurrences(&curve, 1e-6).unwrap();
    assert_eq!(report.recurrences.len(), 10);
    for (k, e) in report.recurrences.iter().enumerate() {
        assert!((e.t - (k + 1) as f64 * PI).abs() < 1e-4);
    }
    assert_eq!(report.minima.len(), 10);
    assert!(report.plateau.is_none());
    assert!(!curve.renormalized);
}

#[test]
fn extrema_of_fast_phase_are_exact() {
    // Coarse grid on a modulated coefficient: every minimum of |F1| is 1/3 and every maximum is 1.
    let spec = CoefficientSpec::mathieu(2.0, 0.5, 2.0).unwrap();
    let init = InitialPhaseData::new(-0.4, 0.3, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&spec, &init, 20.0, 0.05).unwrap();
    let curve = special_curve(&traj, SpecialState::PhiG1).unwrap();
    let report = detect_recurrences(&curve, 1e-6).unwrap();
    assert!(report.minima.len() >= 5);
    for e in &report.minima {
        assert!((e.value - 1.0 / 3.0).abs() < 1e-12, "{e:?}");
        let d = traj.phase_increment(e.t).unwrap();
        assert!((fidelity_g1(d).norm() - 1.0 / 3.0).abs() < 1e-5, "{e:?}");
    }
    for e in &report.recurrences {
        assert!((e.value - 1.0).abs() < 1e-12, "{e:?}");
    }
    assert!(report.infimum >= 1.0 / 3.0 - 1e-12);
}

#[test]
fn inverted_curve_saturates() {
    let spec = CoefficientSpec::constant(-1.0, 0.25).unwrap();
    let s = 0.5 * 2f64.ln();
    let init = InitialPhaseData::new(s, 0.0, -FRAC_PI_4, s).unwrap();
    let traj = integrate_symmetric(&spec, &init, 6.0, 0.01).unwrap();
    let curve = special_curve(&traj, SpecialState::PhiG1).unwrap();
    for (t, v) in curve.times.iter().zip(&curve.values) {
        let expected = 5.0 / 9.0 + 8.0 / (9.0 * ((2.0 * t).exp() + (-2.0 * t).exp()));
        assert!((v.norm_sqr() - expected).abs() < 1e-8, "t={t}");
    }
    let report = detect_recurrences(&curve, 1e-6).unwrap();
    assert!(report.recurrences.is_empty());
    assert!((report.plateau.unwrap().norm_sqr() - 5.0 / 9.0).abs() < 1e-6);
    assert!((report.plateau_past.unwrap().norm_sqr() - 5.0 / 9.0).abs() < 1e-6);
}

#[test]
fn single_component_curve_is_flat() {
    let spec = StateSpec::from_components(1.0, Parity::Odd, vec![HermiteComponent { n: 1, amplitude: 1.0 }])
        .unwrap();
    let coeff = CoefficientSpec::constant(1.0, PI).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&coeff, &init, 5.0, 0.1).unwrap();
    let curve = fidelity_curve(&traj, &spec).unwrap();
    let report = detect_recurrences(&curve, 1e-9).unwrap();
    assert_eq!(report.recurrences.len(), curve.len());
}

#[test]
fn partial_weights_are_renormalized() {
    let spec = StateSpec::from_components(
        2.0,
        Parity::Even,
        vec![
            HermiteComponent { n: 0, amplitude: 0.5 },
            HermiteComponent { n: 2, amplitude: 0.5 },
        ],
    )
    .unwrap();
    assert_eq!(fidelity_general(&spec, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    let coeff = CoefficientSpec::constant(1.0, PI).unwrap();
    let init = InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate_complex_hill(&coeff, &init, 1.0, 0.1).unwrap();
    assert!(fidelity_curve(&traj, &spec).unwrap().renormalized);
}

#[test]
fn invalid_tolerance_is_rejected() {
    let curve = FidelityCurve::from_values(vec![0.0], vec![Complex64::new(1.0, 0.0)]);
    assert!(matches!(detect_recurrences(&curve, 0.0), Err(Error::InvalidParameter { .. })));
    assert!(detect_recurrences(&curve, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn two_term_forms_match_series(d in -100.0f64..100.0) {
        let phi = special_state(SpecialState::PhiG1);
        let chi = special_state(SpecialState::ChiG3);
        prop_assert!((fidelity_general(&phi, d).unwrap() - fidelity_g1(d)).norm() < 1e-14);
        let series = fidelity_g3(d, Eq34Convention::Series);
        prop_assert!((fidelity_general(&chi, d).unwrap() - series).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_by_two_pi_is_pure_phase(g in 0.8f64..2.5, d in -20.0f64..20.0) {
        let spec = StateSpec::for_coupling(g, Parity::Even, 120).unwrap_or_else(|_| {
            let loose = ProjectionOptions { norm_tolerance: 1e-3, ..ProjectionOptions::default() };
            hermite_coefficients_with(alpha_of_g(g).unwrap(), Parity::Even, 120, &loose).unwrap()
        });
        let a = fidelity_general(&spec, d).unwrap();
        let b = fidelity_general(&spec, d + TAU).unwrap();
        prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        let phase = Complex64::from_polar(1.0, -TAU * spec.alpha());
        prop_assert!((b - a * phase).norm() < 1e-12);
    }

    #[test]
    fn magnitude_stays_between_bound_and_one(g in 0.8f64..2.5, d in -20.0f64..20.0) {
        let spec = StateSpec::for_coupling(g, Parity::Odd, 200).unwrap();
        let f = fidelity_general(&spec, d).unwrap().norm();
        let lb = lower_bound(&spec).unwrap();
        prop_assert!(f <= 1.0 + 1e-14);
        prop_assert!(f >= lb - 1e-12);
    }

    #[test]
    fn integer_exponent_recurs_at_two_pi(alpha in 1usize..6, p in 0.01f64..0.99) {
        let (parity, n1) = if alpha % 2 == 0 { (Parity::Even, 0) } else { (Parity::Odd, 1) };
        let spec = two_term(alpha as f64, parity, n1, n1 + 2 * alpha, p);
        let f = fidelity_general(&spec, TAU).unwrap();
        prop_assert!((f - 1.0).norm() < 1e-14);
    }
}
