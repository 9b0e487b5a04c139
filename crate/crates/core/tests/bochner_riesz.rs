use std::sync::Arc;

use conemult::bochner_riesz::{
    br_gamma, br_gamma_with, critical_lambda, critical_lambda_alt, gamma_hat_decay_fit, lambda_grid,
    splitting_residual_max, DecayFit, DECAY_LINE,
};
use conemult::characterization::{condition_iv_quantity, LineSpec};
use conemult::grid::Axis;
use conemult::lorentz::LorentzParams;
use proptest::prelude::*;

#[test]
fn decay_exponents() {
    for (lambda, floor) in [(0.5, 1.4), (1.0, 1.9), (1.5, 2.4)] {
        let fit = gamma_hat_decay_fit(&br_gamma(lambda).unwrap(), (10.0, 1.0e4), &DECAY_LINE).unwrap();
        let e = fit.exponent().unwrap();
        assert!(e >= floor, "λ={lambda}: {e}");
    }
}

#[test]
fn zero_cutoff_reports_zero_input() {
    let g = br_gamma_with(1.0, Arc::new(|_| 0.0)).unwrap();
    assert_eq!(gamma_hat_decay_fit(&g, (10.0, 1000.0), &DECAY_LINE).unwrap(), DecayFit::ZeroInput);
}

#[test]
fn decay_fit_preconditions() {
    let g = br_gamma(1.0).unwrap();
    assert!(gamma_hat_decay_fit(&g, (5.0, 100.0), &DECAY_LINE).is_err());
    let coarse = LineSpec { half_width: 1.0, n: 1 << 10, truncation: 100.0 };
    assert!(gamma_hat_decay_fit(&g, (10.0, 1.0e4), &coarse).is_err());
}

#[test]
fn weak_norm_decreases_in_lambda() {
    let params = LorentzParams::weak(8.0 / 7.0).unwrap();
    let line = LineSpec { half_width: 4.0, n: 1 << 16, truncation: 2000.0 };
    let vals: Vec<f64> = lambda_grid(0.5, 2.0, 0.125)
        .iter()
        .map(|&l| condition_iv_quantity(&br_gamma(l).unwrap(), 4, params, &line).unwrap().value)
        .collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{vals:?}");
}

#[test]
fn splitting_vanishes_on_cone_grids() {
    for lambda in [0.5, 1.0, 1.7] {
        let axes = vec![Axis::new(8.0, 32).unwrap(), Axis::new(8.0, 32).unwrap(), Axis::new(4.0, 64).unwrap()];
        assert!(splitting_residual_max(lambda, axes).unwrap() <= 1e-10);
    }
}

#[test]
fn paper_predictions() {
    assert!((critical_lambda(4, 8.0 / 7.0) - 1.0).abs() < 1e-12);
    assert!((critical_lambda(4, 1.05) - (4.0 / 1.05 - 2.5)).abs() < 1e-12);
    assert!((critical_lambda(4, 1.05) - 1.3095).abs() < 1e-4);
}

proptest! {
    #[test]
    fn two_endpoint_formulas_agree(d in 2usize..12, p in 1.0001f64..4.0) {
        let a = critical_lambda(d, p);
        let b = critical_lambda_alt(d, p);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn gamma_support(lambda in 0.05f64..3.0, u in -2.0f64..2.0) {
        let g = br_gamma(lambda).unwrap();
        if u > 0.0 || u <= -0.25 {
            prop_assert_eq!(g.eval(u), 0.0);
        }
        if (-0.125..=0.0).contains(&u) {
            prop_assert!((g.eval(u) - (-u).powf(lambda)).abs() <= 1e-15);
        }
    }
}
