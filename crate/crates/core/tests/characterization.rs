use std::f64::consts::PI;

use conemult::bochner_riesz::{br_gamma, ScanSpec};
use conemult::bumps::{bump_phi, bump_phi_profile, mollifier};
use conemult::characterization::{
    characterize, condition_iv_quantity, condition_iv_sequence, condition_v_quantity, dilation_invariance_check,
    divergent_trend, dyadic_t_grid, m0_characterization, LineSpec, RadialGridSpec,
};
use conemult::lorentz::LorentzParams;
use conemult::profile::Profile1d;
use conemult::quadrature::integrate_real;
use conemult::special::sphere_area;
use proptest::prelude::*;

mod common;
use common::profile_family;

fn smooth_bump() -> Profile1d {
    Profile1d::new("bump", (0.6, 1.4), |s| mollifier((s - 1.0) / 0.4))
}

#[test]
fn condition_v_plancherel() {
    let g = smooth_bump();
    let params = LorentzParams::strong(2.0).unwrap();
    for d in 2..=4 {
        let got = condition_v_quantity(&g, d, params, &RadialGridSpec::default()).unwrap();
        let l2 = (sphere_area(d)
            * integrate_real(|r| g.eval(r).powi(2) * r.powi(d as i32 - 1), 0.6, 1.4, &[], 0.01))
        .sqrt();
        let want = (2.0 * PI).powf(-(d as f64) / 2.0) * l2;
        assert!((got - want).abs() < 1e-4 * want, "d={d}: {got} vs {want}");
    }
}

#[test]
fn smooth_window_converges_in_truncation() {
    let g = Profile1d::new("gauss", (-0.25, 0.25), |u| (-200.0 * u * u).exp() * mollifier(4.0 * u));
    for params in [LorentzParams::new(1.2, 2.0).unwrap(), LorentzParams::weak(8.0 / 7.0).unwrap()] {
        let seq = condition_iv_sequence(&g, 4, params, &LineSpec::default(), &[250.0, 500.0, 1000.0]).unwrap();
        assert!((seq[2].value / seq[1].value - 1.0).abs() < 0.01);
        assert!((seq[1].value / seq[0].value - 1.0).abs() < 0.01);
    }
}

#[test]
fn monotone_in_truncation_for_strong_type() {
    let params = LorentzParams::strong(1.3).unwrap();
    let rs = [100.0, 200.0, 400.0, 800.0, 1600.0];
    for g in profile_family() {
        let seq = condition_iv_sequence(&g, 3, params, &LineSpec::default(), &rs).unwrap();
        assert!(seq.windows(2).all(|w| w[1].value >= w[0].value), "{}", g.label());
    }
}

#[test]
fn bochner_riesz_profiles_against_the_membership_rule() {
    let spec = ScanSpec::default();
    let weak = |p: f64| LorentzParams::weak(p).unwrap();
    let blocks = |lambda: f64, p: f64| {
        condition_iv_sequence(&br_gamma(lambda).unwrap(), 4, weak(p), &spec.line, &spec.truncations)
            .unwrap()
            .iter()
            .map(|q| q.top_block)
            .collect::<Vec<_>>()
    };
    assert!(!divergent_trend(&blocks(1.0, 8.0 / 7.0)));
    assert!(!divergent_trend(&blocks(1.0, 1.25)));
    assert!(divergent_trend(&blocks(0.5, 8.0 / 7.0)));
    let full: Vec<f64> = condition_iv_sequence(&br_gamma(1.0).unwrap(), 4, weak(8.0 / 7.0), &spec.line, &spec.truncations)
        .unwrap()
        .iter()
        .map(|q| q.value)
        .collect();
    assert!((full[3] / full[2] - 1.0).abs() < 0.05);
}

#[test]
fn iv_and_v_are_comparable_across_the_family() {
    for (d, p, nu) in [(2usize, 1.2, 1.2), (3, 1.5, 2.0), (4, 8.0 / 7.0, f64::INFINITY)] {
        let params = LorentzParams::new(p, nu).unwrap();
        let ratios: Vec<f64> = profile_family()
            .iter()
            .map(|g| {
                let iv = condition_iv_quantity(g, d, params, &LineSpec::default()).unwrap().value;
                condition_v_quantity(g, d, params, &RadialGridSpec::default()).unwrap() / iv
            })
            .collect();
        let c = ratios.iter().map(|r| r.max(1.0 / r)).fold(0.0, f64::max);
        assert!(c <= 20.0, "d={d}: {ratios:?}");
    }
}

#[test]
fn report_sup_is_max_of_entries() {
    let fam = profile_family();
    let params = LorentzParams::new(1.5, 2.0).unwrap();
    let line = LineSpec { truncation: 800.0, ..LineSpec::default() };
    let radial = RadialGridSpec { r_max: 100.0, n: 3200 };
    let rep = characterize(0, &fam[..4], None, 3, params, &line, &radial).unwrap();
    let max = rep.quantity_iv.entries.iter().map(|e| e.value).fold(0.0, f64::max);
    assert_eq!(rep.quantity_iv.sup, max);
    let max = rep.quantity_v.entries.iter().map(|e| e.value).fold(0.0, f64::max);
    assert_eq!(rep.quantity_v.sup, max);
    assert_eq!(rep.truncations, vec![100.0, 200.0, 400.0, 800.0]);
    for e in &rep.quantity_iv.entries {
        assert!(e.nested.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }
}

#[test]
fn m0_of_constant_is_t_independent() {
    let one = Profile1d::new("one", (0.0, f64::INFINITY), |_| 1.0);
    let params = LorentzParams::weak(1.2).unwrap();
    let rep = m0_characterization(&one, 3, params, &dyadic_t_grid(-2, 2, 4), &bump_phi_profile(), &LineSpec::default())
        .unwrap();
    assert!(rep.values.iter().all(|v| (v - rep.values[0]).abs() <= 1e-12 * rep.values[0]));
}

#[test]
fn m0_reduces_to_line_functional() {
    let m0 = smooth_bump();
    let params = LorentzParams::new(1.4, 3.0).unwrap();
    let line = LineSpec::default();
    let rep = m0_characterization(&m0, 3, params, &[1.0], &bump_phi_profile(), &line).unwrap();
    let prod = Profile1d::new("phi*m0", (0.5, 2.0), move |s| bump_phi(s) * m0.eval(s));
    let iv = condition_iv_quantity(&prod, 3, params, &line).unwrap();
    assert!((rep.sup - iv.value).abs() <= 1e-12 * iv.value);
}

#[test]
fn m0_of_bochner_riesz_symbol_is_finite() {
    let m0 = Profile1d::new("br", (0.0, 1.0), |r| 1.0 - r * r).with_kinks(vec![1.0]);
    let params = LorentzParams::weak(8.0 / 7.0).unwrap();
    let grid = dyadic_t_grid(-2, 2, 16);
    let sups: Vec<f64> = [1000.0, 2000.0, 4000.0]
        .iter()
        .map(|&r| {
            let spec = LineSpec { truncation: r, ..LineSpec::default() };
            m0_characterization(&m0, 4, params, &grid, &bump_phi_profile(), &spec).unwrap().sup
        })
        .collect();
    assert!(sups.iter().all(|s| s.is_finite()));
    assert!((sups[2] / sups[0] - 1.0).abs() < 0.01);
}

#[test]
fn m0_of_ball_indicator_diverges() {
    let m0 = Profile1d::new("ball", (0.0, 1.0), |_| 1.0).with_kinks(vec![1.0]);
    let params = LorentzParams::weak(1.2).unwrap();
    let values: Vec<f64> = [500.0, 1000.0, 2000.0, 4000.0]
        .iter()
        .map(|&r| {
            let spec = LineSpec { truncation: r, ..LineSpec::default() };
            m0_characterization(&m0, 4, params, &[1.0], &bump_phi_profile(), &spec).unwrap().sup
        })
        .collect();
    assert!(divergent_trend(&values), "{values:?}");
}

#[test]
fn dilation_invariance() {
    // supported away from 0 so that the sup over t is attained inside the grid
    let m0 = Profile1d::new("cap", (1.0, 3.0), |r| ((r - 1.0) * (3.0 - r)).powf(1.5));
    let params = LorentzParams::new(1.3, 2.0).unwrap();
    let phi = bump_phi_profile();
    let line = LineSpec { truncation: 500.0, ..LineSpec::default() };
    let dyadic = dyadic_t_grid(-3, 3, 1);
    let r1 = dilation_invariance_check(&m0, 3, params, 1.0, &dyadic, &phi, &line).unwrap();
    assert_eq!(r1, 1.0);
    // the dilated symbol's sup is taken over t·2, still inside the grid
    let grid = dyadic_t_grid(-4, 3, 1);
    let r2 = dilation_invariance_check(&m0, 3, params, 2.0, &grid, &phi, &line).unwrap();
    assert!((r2 - 1.0).abs() < 1e-9, "{r2}");
    let dense = dyadic_t_grid(-4, 4, 32);
    let r3 = dilation_invariance_check(&m0, 3, params, 3.0, &dense, &phi, &line).unwrap();
    assert!((r3 - 1.0).abs() < 0.02, "{r3}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_and_modulation_invariance(c in 0.1f64..10.0, shift in -0.05f64..0.05, w in 0.08f64..0.15) {
        let params = LorentzParams::new(1.3, 2.5).unwrap();
        let line = LineSpec { truncation: 500.0, ..LineSpec::default() };
        let g = Profile1d::new("g", (-w, w), move |s| mollifier(s / w) * (1.0 + s));
        let a = condition_iv_quantity(&g, 3, params, &line).unwrap().value;
        let scaled = g.scaled(c);
        let b = condition_iv_quantity(&scaled, 3, params, &line).unwrap().value;
        prop_assert!((b - c * a).abs() <= 1e-10 * c * a);
        // |γ̂| is unchanged by translation; the grid sees a translate by a
        // non-integer number of cells, so compare at quadrature accuracy
        let moved = g.shifted(shift);
        let m = condition_iv_quantity(&moved, 3, params, &line).unwrap().value;
        prop_assert!((m - a).abs() <= 1e-6 * a, "{} vs {}", m, a);
    }
}
