use std::f64::consts::PI;

use conemult::profile::Profile1d;
use conemult::radial_fourier::{
    dyadic_envelope, fourier_1d, fourier_1d_real, geometric_grid, loglog_slope, radial_transform,
    radial_transform_fn, sphere_measure_hat, sphere_measure_transform, RadialProfile, RadialTransformOptions,
};
use conemult::special::{bessel_j, sphere_area};
use conemult::Complex64;
use proptest::prelude::*;

fn gaussian(r: f64) -> Complex64 {
    Complex64::new((-0.5 * r * r).exp(), 0.0)
}

#[test]
fn tent_transform() {
    let tent = Profile1d::tent(1.0);
    let s = fourier_1d_real(|x| tent.eval(x), 8.0, 1 << 14).unwrap();
    for (sig, v) in s.freqs.iter().zip(&s.values) {
        let want = if *sig == 0.0 { 1.0 } else { ((sig / 2.0).sin() / (sig / 2.0)).powi(2) };
        assert!((v - want).norm() <= 1e-6, "σ={sig}");
    }
}

#[test]
fn gaussian_line_transform() {
    let s = fourier_1d(gaussian, 20.0, 1 << 12).unwrap();
    for (sig, v) in s.freqs.iter().zip(&s.values) {
        let want = (2.0 * PI).sqrt() * (-0.5 * sig * sig).exp();
        assert!((v - want).norm() <= 1e-8);
    }
}

#[test]
fn real_even_input_has_real_even_transform() {
    let f = |x: f64| Complex64::new((-x * x).exp() * (3.0 * x).cos() + 1.0 / (1.0 + x.powi(4)), 0.0);
    let s = fourier_1d(f, 16.0, 1 << 12).unwrap();
    let max = s.max_abs();
    let n = s.freqs.len();
    for (i, v) in s.values.iter().enumerate() {
        assert!(v.im.abs() <= 1e-10 * max);
        // σ_m and σ_{-m} sit symmetrically around the zero frequency
        let zero = n / 2;
        if i > 0 {
            let j = 2 * zero - i;
            if j < n {
                assert!((v.re - s.values[j].re).abs() <= 1e-10 * max);
            }
        }
    }
}

#[test]
fn gaussian_self_transform_all_dimensions() {
    let xs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    for d in 2..=4 {
        let out = radial_transform_fn(gaussian, (0.0, 40.0), &[], d, &xs, RadialTransformOptions::forward())
            .unwrap()
            .require_reliable()
            .unwrap();
        let peak = (2.0 * PI).powf(d as f64 / 2.0);
        for (x, v) in xs.iter().zip(out.values()) {
            let want = peak * (-0.5 * x * x).exp();
            assert!((v - want).norm() <= 1e-6 * peak, "d={d} ξ={x}: {v} vs {want}");
        }
    }
}

#[test]
fn total_integral_in_the_plane() {
    let out = radial_transform_fn(gaussian, (0.0, 40.0), &[], 2, &[0.0], RadialTransformOptions::forward())
        .unwrap()
        .require_reliable()
        .unwrap();
    assert!((out.values()[0].re - 2.0 * PI).abs() < 1e-10);
}

#[test]
fn inverse_undoes_forward_on_gaussians() {
    let xs = geometric_grid(0.05, 6.0, 40);
    for d in 2..=4 {
        let inv = radial_transform_fn(
            |r| Complex64::new((2.0 * PI).powf(d as f64 / 2.0) * (-0.5 * r * r).exp(), 0.0),
            (0.0, 40.0),
            &[],
            d,
            &xs,
            RadialTransformOptions::inverse(),
        )
        .unwrap()
        .require_reliable()
        .unwrap();
        for (x, v) in xs.iter().zip(inv.values()) {
            assert!((v - gaussian(*x)).norm() < 1e-9);
        }
    }
}

#[test]
fn dilation_covariance() {
    let xs = geometric_grid(0.05, 8.0, 30);
    for d in 2..=4 {
        let base = radial_transform_fn(gaussian, (0.0, 40.0), &[], d, &xs, RadialTransformOptions::inverse())
            .unwrap()
            .require_reliable()
            .unwrap();
        for t in [0.5, 2.0] {
            let scaled: Vec<f64> = xs.iter().map(|x| x * t).collect();
            let dil = radial_transform_fn(
                |r| gaussian(t * r),
                (0.0, 40.0 / t),
                &[],
                d,
                &scaled,
                RadialTransformOptions::inverse(),
            )
            .unwrap()
            .require_reliable()
            .unwrap();
            for (a, b) in base.values().iter().zip(dil.values()) {
                let want = a * t.powi(-(d as i32));
                assert!((b - want).norm() <= 1e-6 * want.norm().max(1e-3));
            }
        }
    }
}

/// `∫|m|² r^{d-1} dr` against `(2π)^d ∫|F^{-1} m|² x^{d-1} dx` for a smooth
/// approximation of the unit-ball indicator.
#[test]
fn plancherel_for_smoothed_indicator() {
    let m = |r: f64| 0.5 * (1.0 - ((r - 1.0) / 0.08).tanh());
    for d in 2..=4 {
        let lhs: f64 = (0..200000)
            .map(|i| (i as f64 + 0.5) * 4.0 / 200000.0)
            .map(|r| m(r).powi(2) * r.powi(d as i32 - 1) * 4.0 / 200000.0)
            .sum();
        let h = 1.0 / 64.0;
        let xs: Vec<f64> = (0..(240.0 / h) as usize).map(|i| (i as f64 + 0.5) * h).collect();
        let opts = RadialTransformOptions { node_budget: 20_000_000, ..RadialTransformOptions::inverse() };
        let out = radial_transform_fn(|r| Complex64::new(m(r), 0.0), (0.0, 4.0), &[], d, &xs, opts)
            .unwrap()
            .require_reliable()
            .unwrap();
        let rhs: f64 = xs
            .iter()
            .zip(out.values())
            .map(|(x, v)| v.norm_sqr() * x.powi(d as i32 - 1) * h)
            .sum::<f64>()
            * (2.0 * PI).powi(d as i32);
        assert!((lhs - rhs).abs() < 1e-4 * lhs, "d={d}: {lhs} vs {rhs}");
    }
}

#[test]
fn tabulated_and_closure_transforms_agree() {
    let radii: Vec<f64> = (0..=800).map(|i| i as f64 * 0.01).collect();
    let values: Vec<Complex64> = radii.iter().map(|&r| gaussian(r)).collect();
    let profile = RadialProfile::new(radii, values, 3).unwrap();
    let xs = [0.0, 0.5, 1.0, 2.0, 4.0];
    let a = radial_transform(&profile, &xs, RadialTransformOptions::forward()).unwrap();
    assert!(a.all_reliable());
    let b = radial_transform_fn(gaussian, (0.0, 8.0), &[], 3, &xs, RadialTransformOptions::forward()).unwrap();
    for (u, v) in a.profile.values().iter().zip(b.profile.values()) {
        assert!((u - v).norm() < 1e-6 * (2.0 * PI).powf(1.5));
    }
}

#[test]
fn unit_sphere_transform_in_three_dimensions() {
    let xs: Vec<f64> = (1..=2000).map(|i| i as f64 * 0.01).collect();
    let prof = sphere_measure_transform(1.0, 3, &xs).unwrap();
    for (x, v) in xs.iter().zip(prof.values()) {
        let want = 4.0 * PI * x.sin() / x;
        assert!((v.re - want).abs() <= 1e-9, "ξ={x}");
    }
    assert!((sphere_measure_hat(1.0, 3, 0.0) - 4.0 * PI).abs() < 1e-12);
    assert!(sphere_measure_transform(0.0, 3, &xs).is_err());
    for d in 2..=4 {
        let r: f64 = 1.7;
        assert!((sphere_measure_hat(r, d, 0.0) - sphere_area(d) * r.powi(d as i32 - 1)).abs() < 1e-10);
    }
}

#[test]
fn sphere_transform_decay_exponent() {
    for d in 2..=4 {
        let xs = geometric_grid(10.0, 1000.0, 4000);
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, sphere_measure_hat(1.0, d, x).abs())).collect();
        let env = dyadic_envelope(&pts, 10.0, 1000.0);
        let (a, b): (Vec<f64>, Vec<f64>) = env.into_iter().unzip();
        let slope = -loglog_slope(&a, &b);
        assert!((slope - (d as f64 - 1.0) / 2.0).abs() < 0.05, "d={d}: {slope}");
    }
}

#[test]
fn bessel_examples() {
    assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
    let x: f64 = 1.0;
    assert!((bessel_j(0.5, x).unwrap() - (2.0 / (PI * x)).sqrt() * x.sin()).abs() < 1e-12);
    assert!((bessel_j(0.5, 1.0).unwrap() - 0.671397).abs() < 1e-6);
    // series to 20 terms
    let mut s = 0.0;
    let mut fact_k = 1.0;
    for k in 0..20 {
        if k > 0 {
            fact_k *= k as f64;
        }
        let fact_k1 = fact_k * (k + 1) as f64;
        s += (-1f64).powi(k) / (fact_k * fact_k1) * 0.5f64.powi(2 * k + 1);
    }
    assert!((bessel_j(1.0, 1.0).unwrap() - s).abs() < 1e-14);
    assert!((s - 0.4400505857).abs() < 1e-10);
    assert!(bessel_j(0.3, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radial_transform_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.5f64..3.0, d in 2usize..=4) {
        let xs = [0.0, 0.7, 2.0, 5.0];
        let f = |r: f64| gaussian(r);
        let g = move |r: f64| Complex64::new((-(r * w).powi(2)).exp() * r.cos(), 0.0);
        let opts = RadialTransformOptions { profile_frequency: 1.0, ..RadialTransformOptions::inverse() };
        let tf = radial_transform_fn(f, (0.0, 20.0), &[], d, &xs, opts).unwrap();
        let tg = radial_transform_fn(g, (0.0, 20.0), &[], d, &xs, opts).unwrap();
        let th = radial_transform_fn(move |r| f(r) * a + g(r) * b, (0.0, 20.0), &[], d, &xs, opts).unwrap();
        for i in 0..xs.len() {
            let want = tf.profile.values()[i] * a + tg.profile.values()[i] * b;
            prop_assert!((th.profile.values()[i] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn line_transform_is_linear(a in -3.0f64..3.0, shift in -1.0f64..1.0) {
        let f = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        let g = move |x: f64| Complex64::new(0.0, (-(x - shift).powi(2) * 3.0).exp());
        let sf = fourier_1d(f, 8.0, 256).unwrap();
        let sg = fourier_1d(g, 8.0, 256).unwrap();
        let sh = fourier_1d(move |x| f(x) * a + g(x), 8.0, 256).unwrap();
        for i in 0..256 {
            let want = sf.values[i] * a + sg.values[i];
            prop_assert!((sh.values[i] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }
}
