use std::f64::consts::PI;

use loschmidt::hill::InitialPhaseData;
use loschmidt::oracle::SpatialGrid;
use loschmidt::states::*;
use loschmidt::Error;
use proptest::prelude::*;

fn origin() -> SqueezeParams {
    InitialPhaseData::new(0.0, 0.0, 0.0, 0.0).unwrap()
}

#[test]
fn exponent_and_normalization() {
    assert_eq!(alpha_of_g(0.0).unwrap(), 1.0);
    assert!((alpha_of_g(1.0).unwrap() - 2.0).abs() < 1e-15);
    assert!((alpha_of_g(3f64.sqrt()).unwrap() - 3.0).abs() < 1e-15);
    assert!(alpha_of_g(-1.0).is_err());
    let c2 = |a: f64| normalization_constant(a).unwrap().powi(2);
    assert!((c2(2.0) - 4.0 / (3.0 * PI.sqrt())).abs() < 1e-14);
    assert!((c2(3.0) - 8.0 / (15.0 * PI.sqrt())).abs() < 1e-14);
    assert!(normalization_constant(-0.5).is_err());
}

#[test]
fn quadrature_reproduces_finite_expansions() {
    let two = hermite_coefficients(2.0, Parity::Even, 30).unwrap();
    assert!((two.weight_of(0) - 1.0 / 3.0).abs() < 1e-10);
    assert!((two.weight_of(2) - 2.0 / 3.0).abs() < 1e-10);
    for n in (4..=30).step_by(2) {
        assert!(two.weight_of(n) < 1e-20, "n={n}");
    }
    let three = hermite_coefficients(3.0, Parity::Odd, 31).unwrap();
    assert!((three.weight_of(1) - 0.6).abs() < 1e-10);
    assert!((three.weight_of(3) - 0.4).abs() < 1e-10);
    assert!(three.components().iter().all(|c| c.n % 2 == 1));
    let one = hermite_coefficients(1.0, Parity::Odd, 11).unwrap();
    assert!((one.weight_of(1) - 1.0).abs() < 1e-12);
    assert!(one.norm_defect() < 1e-12);
}

#[test]
fn general_exponent_weights_match_reference() {
    // Direct adaptive quadrature of <phi_n, psi> at 30 digits.
    let even = hermite_coefficients(2.5, Parity::Even, 80).unwrap();
    let expected = [
        (0, 0.238_278_680_098_306_62),
        (2, 0.744_620_875_307_208_18),
        (4, 0.015_512_934_902_233_504),
        (6, 0.001_163_470_117_667_512_8),
        (10, 8.554_333_243_614_438_6e-5),
    ];
    for (n, w) in expected {
        assert!((even.weight_of(n) - w).abs() < 1e-12, "n={n}");
    }
    // The odd extension converges more slowly; its N = 200 defect is 1.3e-6.
    let loose = ProjectionOptions {
        norm_tolerance: 1e-5,
        ..ProjectionOptions::default()
    };
    let spec = hermite_coefficients_with(alpha_of_g(0.7).unwrap(), Parity::Odd, 200, &loose).unwrap();
    assert!((spec.alpha() - 1.609_053_650_640_941_7).abs() < 1e-14);
    for (n, w) in [
        (1, 0.933_656_354_430_683_2),
        (3, 0.057_722_736_038_658_159),
        (5, 0.005_583_900_496_293_831),
        (7, 0.001_528_727_990_198_036_5),
        (21, 3.519_531_950_358_199_7e-5),
    ] {
        assert!((spec.weight_of(n) - w).abs() < 1e-12, "n={n}");
    }
    assert!(spec.norm_defect() <= 1e-5);
    let even = StateSpec::for_coupling(0.7, Parity::Even, 200).unwrap();
    assert!(even.norm_defect() <= 1e-6);
    for (n, w) in [
        (0, 0.431_676_083_436_020_17),
        (2, 0.558_816_269_857_205_88),
        (4, 0.007_117_412_227_917_750_5),
    ] {
        assert!((even.weight_of(n) - w).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn insufficient_nodes_are_reported() {
    let opts = ProjectionOptions {
        nodes: Some(5),
        ..ProjectionOptions::default()
    };
    let res = hermite_coefficients_with(2.5, Parity::Even, 40, &opts);
    assert!(matches!(res, Err(Error::IncreaseNodes { .. })));
}

#[test]
fn truncation_defect_is_reported() {
    // A low truncation leaves more than the default tolerance unaccounted for.
    let res = hermite_coefficients(2.5, Parity::Even, 4);
    assert!(matches!(res, Err(Error::NormDefect { .. })));
    let loose = ProjectionOptions {
        norm_tolerance: 0.1,
        ..ProjectionOptions::default()
    };
    let spec = hermite_coefficients_with(2.5, Parity::Even, 4, &loose).unwrap();
    assert!(spec.norm_defect() > 1e-4);
}

#[test]
fn special_states_are_finite() {
    let phi = special_state(SpecialState::PhiG1);
    assert_eq!(phi.alpha(), 2.0);
    assert_eq!(phi.weights().map(|w| w.0).collect::<Vec<_>>(), vec![0, 2]);
    let chi = special_state(SpecialState::ChiG3);
    assert_eq!(chi.alpha(), 3.0);
    assert_eq!(chi.parity(), Parity::Odd);
    for s in [phi, chi] {
        assert!((s.weight_sum() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_state_matches_profile() {
    let grid = SpatialGrid::full_line(12.0, 2048).unwrap();
    let phi = special_state(SpecialState::PhiG1);
    let state = sample_state(&phi, &origin(), &grid).unwrap();
    let c1 = (4.0 / (3.0 * PI.sqrt())).sqrt();
    for (x, a) in grid.nodes().zip(state.amplitudes()).step_by(97) {
        assert!((a.re - c1 * x * x * (-0.5 * x * x).exp()).abs() < 1e-14);
        assert_eq!(a.im, 0.0);
    }
    assert!((state.norm() - 1.0).abs() < 1e-6);
}

#[test]
fn dilation_doubles_width() {
    let grid = SpatialGrid::full_line(24.0, 4096).unwrap();
    let chi = special_state(SpecialState::ChiG3);
    let wide = InitialPhaseData::new(2f64.ln(), 0.0, 0.0, 0.0).unwrap();
    let a = sample_state(&chi, &origin(), &grid).unwrap();
    let b = sample_state(&chi, &wide, &grid).unwrap();
    let second_moment = |s: &loschmidt::oracle::GridState| -> f64 {
        grid.nodes()
            .zip(s.amplitudes())
            .map(|(x, a)| x * x * a.norm_sqr())
            .sum::<f64>()
            * grid.spacing()
    };
    assert!((second_moment(&b) / second_moment(&a) - 4.0).abs() < 1e-6);
    assert!((b.norm() - 1.0).abs() < 1e-6);
}

#[test]
fn short_grid_is_rejected() {
    let grid = SpatialGrid::full_line(3.0, 512).unwrap();
    let res = sample_state(&special_state(SpecialState::PhiG1), &origin(), &grid);
    assert!(res.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truncated_expansions_are_nearly_complete(g in 0.8f64..2.5, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let spec = StateSpec::for_coupling(g, parity, DEFAULT_TRUNCATION).unwrap();
        prop_assert!(spec.weight_sum() <= 1.0 + 1e-12);
        prop_assert!(spec.norm_defect() <= 1e-6);
        prop_assert!(spec.components().iter().all(|c| parity.matches(c.n)));
    }

    #[test]
    fn defect_shrinks_with_truncation(g in 0.0f64..0.8, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let loose = ProjectionOptions { norm_tolerance: 1.0, ..ProjectionOptions::default() };
        let alpha = alpha_of_g(g).unwrap();
        let coarse = hermite_coefficients_with(alpha, parity, 100, &loose).unwrap();
        let fine = hermite_coefficients_with(alpha, parity, 200, &loose).unwrap();
        prop_assert!(fine.norm_defect() <= coarse.norm_defect() + 1e-13);
        prop_assert!(fine.weight_sum() <= 1.0 + 1e-12);
    }

    #[test]
    fn squeezing_preserves_norm(s in -0.7f64..0.7, udot in -1.0f64..1.0, theta in -3.0f64..3.0) {
        let grid = SpatialGrid::full_line(16.0, 4096).unwrap();
        let squeeze = InitialPhaseData::new(s, udot, theta, 0.0).unwrap();
        let state = sample_state(&special_state(SpecialState::PhiG1), &squeeze, &grid).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-6);
    }
}
