use std::f64::consts::PI;

use conemult::bochner_riesz::br_gamma;
use conemult::bumps::{chi, chi1};
use conemult::grid::{cube, Axis, GridField, Representation};
use conemult::multiplier::{
    apply_cone, apply_modulated_sum, apply_multiplier, apply_radial, apply_ttau, br_cone_value, build_br_cone,
    build_mgamma, build_modulated, dyadic_slab, GammaFamily, ModulatedFamily, SlabTerm,
};
use conemult::profile::Profile1d;
use conemult::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(axes: Vec<Axis>, repr: Representation, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = axes.iter().map(|a| a.n).product();
    let v = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    GridField::new(axes, v, repr).unwrap()
}

/// Separable direct DFT along every axis with explicit twiddles.
fn direct_dft(values: &[Complex64], dims: &[usize], sign: f64) -> Vec<Complex64> {
    let total: usize = dims.iter().product();
    let nd = dims.len();
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let decode = |mut i: usize| {
        let mut idx = vec![0usize; nd];
        for a in (0..nd).rev() {
            idx[a] = i % dims[a];
            i /= dims[a];
        }
        idx
    };
    let idx: Vec<Vec<usize>> = (0..total).map(decode).collect();
    for (o, slot) in out.iter_mut().enumerate() {
        let ko = &idx[o];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let phase: f64 = (0..nd).map(|a| (ko[a] * idx[j][a]) as f64 / dims[a] as f64).sum();
            acc += v * Complex64::from_polar(1.0, sign * 2.0 * PI * phase);
        }
        *slot = acc;
    }
    out
}

#[test]
fn apply_matches_direct_dft_on_16_cubed() {
    let axes = cube(3, 2.0, 16).unwrap();
    let f = random_field(axes.clone(), Representation::Space, 1);
    let m = random_field(axes, Representation::Frequency, 2);
    let got = apply_multiplier(&f, &m).unwrap();
    let dims = [16, 16, 16];
    let hat = direct_dft(f.values(), &dims, -1.0);
    let prod: Vec<Complex64> = hat.iter().zip(m.values()).map(|(a, b)| a * b).collect();
    let back = direct_dft(&prod, &dims, 1.0);
    for (g, w) in got.values().iter().zip(&back) {
        assert!((g - w / 4096.0).norm() < 1e-9);
    }
}

fn tent() -> Profile1d {
    Profile1d::tent(0.25)
}

#[test]
fn tent_value_on_the_slab() {
    let fam = GammaFamily::uniform(-2, 4, tent()).unwrap();
    for k in -2..=4 {
        let s = 2f64.powi(k);
        assert!((fam.mgamma_value(s * (1.0 + 1.0 / 8.0), s) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn zero_family_gives_zero_field() {
    let fam = GammaFamily::uniform(-1, 3, Profile1d::zero()).unwrap();
    let m = build_mgamma(&fam, cube(3, 8.0, 16).unwrap()).unwrap();
    assert!(m.field.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
}

#[test]
fn support_bookkeeping_on_every_grid_point() {
    let fam = GammaFamily::uniform(-1, 3, tent()).unwrap();
    let m = build_mgamma(&fam, vec![Axis::new(4.0, 32).unwrap(), Axis::new(4.0, 32).unwrap(), Axis::new(2.0, 64).unwrap()])
        .unwrap();
    let mut k = [0.0; 3];
    let mut nonzero = 0;
    for i in 0..m.field.len() {
        if m.field.values()[i].norm() == 0.0 {
            continue;
        }
        nonzero += 1;
        m.field.freqs_into(i, &mut k);
        let (xi, tau) = ((k[0] * k[0] + k[1] * k[1]).sqrt(), k[2]);
        let slab = dyadic_slab(tau).expect("nonzero value at τ <= 0");
        let s = 2f64.powi(slab);
        assert!(tau >= s && tau < 2.0 * s);
        assert!((xi - tau).abs() < s / 4.0);
    }
    assert!(nonzero > 100);
}

#[test]
fn sampled_profiles_match_pointwise_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let profiles: Vec<Profile1d> = (0..4)
        .map(|_| {
            let xs: Vec<f64> = (0..=40).map(|i| -0.25 + i as f64 * 0.0125).collect();
            let mut ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            ys[0] = 0.0;
            ys[40] = 0.0;
            Profile1d::sampled(xs, ys, (-0.25, 0.25)).unwrap()
        })
        .collect();
    let fam = GammaFamily::new(0, profiles.clone()).unwrap();
    let axes = vec![Axis::new(2.0, 32).unwrap(), Axis::new(2.0, 32).unwrap(), Axis::new(1.0, 128).unwrap()];
    let m = build_mgamma(&fam, axes).unwrap();
    let mut k = [0.0; 3];
    for _ in 0..10_000 {
        let i = rng.gen_range(0..m.field.len());
        m.field.freqs_into(i, &mut k);
        let (xi, tau) = ((k[0] * k[0] + k[1] * k[1]).sqrt(), k[2]);
        let mut want = 0.0;
        for (j, g) in profiles.iter().enumerate() {
            let lo = 2f64.powi(j as i32);
            if tau >= lo && tau < 2.0 * lo {
                want = g.eval((xi - tau) / lo);
            }
        }
        assert!((m.field.values()[i].re - want).abs() <= 1e-9);
    }
}

#[test]
fn modulated_builder() {
    let axes = vec![Axis::new(4.0, 32).unwrap(), Axis::new(4.0, 32).unwrap(), Axis::new(4.0, 32).unwrap()];
    // Γ ≡ 1 near 0 and b = 0: only the cutoffs remain
    let flat = Profile1d::new("one", (-20.0, 20.0), |_| 1.0);
    let fam = ModulatedFamily::new(0, vec![flat], vec![0.0]).unwrap();
    let m = build_modulated(&fam, axes.clone()).unwrap();
    let mut k = [0.0; 3];
    for i in 0..m.field.len() {
        m.field.freqs_into(i, &mut k);
        let xi = (k[0] * k[0] + k[1] * k[1]).sqrt();
        assert!((m.field.values()[i].re - chi1(xi) * chi(k[2])).abs() < 1e-15);
    }
    // tent with slope 1: support bookkeeping
    let fam = ModulatedFamily::new(0, vec![Profile1d::tent(0.5)], vec![1.0]).unwrap();
    let m = build_modulated(&fam, axes.clone()).unwrap();
    for i in 0..m.field.len() {
        if m.field.values()[i].norm() > 0.0 {
            m.field.freqs_into(i, &mut k);
            let xi = (k[0] * k[0] + k[1] * k[1]).sqrt();
            assert!((5.0 / 8.0..=17.0 / 8.0).contains(&xi) && k[2].abs() <= 4.0);
        }
    }
    assert!(ModulatedFamily::new(0, vec![Profile1d::tent(0.5)], vec![2.5]).is_err());
    // Bochner–Riesz profiles with slope 1 across slabs
    let g = br_gamma(1.5).unwrap();
    let fam = ModulatedFamily::new(-1, vec![g.clone(), g.clone(), g.clone()], vec![1.0; 3]).unwrap();
    let m = build_modulated(&fam, axes).unwrap();
    for i in 0..m.field.len() {
        m.field.freqs_into(i, &mut k);
        let xi = (k[0] * k[0] + k[1] * k[1]).sqrt();
        let want: f64 = (-1..=1)
            .map(|j| {
                let s = 2f64.powi(j);
                chi1(xi / s) * chi(k[2] / s) * g.eval((xi - k[2]) / s)
            })
            .sum();
        assert!((m.field.values()[i].re - want).abs() < 1e-14);
    }
}

#[test]
fn br_cone_formula() {
    for tau in [0.3, 1.0, 7.0] {
        assert_eq!(br_cone_value(0.7, 0.0, tau), 1.0);
        assert_eq!(br_cone_value(0.7, tau, tau), 0.0);
        assert_eq!(br_cone_value(0.7, 2.0 * tau, tau), 0.0);
        assert!((br_cone_value(1.0, tau / 2.0, tau) - 0.75).abs() < 1e-15);
    }
    assert_eq!(br_cone_value(1.0, 0.0, -1.0), 0.0);
    assert!(build_br_cone(0.0, cube(2, 1.0, 8).unwrap()).is_err());
    let m = build_br_cone(1.0, cube(3, 4.0, 8).unwrap()).unwrap();
    let f = random_field(cube(3, 4.0, 8).unwrap(), Representation::Space, 5);
    let out = apply_cone(&f, &m).unwrap();
    assert!(out.lp_norm(2.0) <= f.lp_norm(2.0) * (1.0 + 1e-12));
}

fn wide_gaussian(n: usize, extent: f64, sigma: f64) -> GridField {
    GridField::from_fn(cube(2, extent, n).unwrap(), |x| {
        Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma * sigma)).exp(), 0.0)
    })
    .unwrap()
}

#[test]
fn ttau_basics() {
    let f = random_field(cube(2, 8.0, 64).unwrap(), Representation::Space, 3);
    let zero = GammaFamily::uniform(0, 2, Profile1d::zero()).unwrap();
    assert_eq!(apply_ttau(&f, 1.5, &zero).unwrap().max_abs(), 0.0);
    let fam = GammaFamily::uniform(0, 2, tent()).unwrap();
    assert!(apply_ttau(&f, 9.0, &fam).is_err());
    assert!(apply_ttau(&f, -1.0, &fam).is_err());
    // Fourier mass of a wide Gaussian sits far inside |ξ| < 5/4
    let g = wide_gaussian(128, 128.0, 8.0);
    let out = apply_ttau(&g, 1.5, &fam).unwrap();
    assert!(out.lp_norm(2.0) <= 1e-10 * g.lp_norm(2.0));
}

#[test]
fn ttau_matches_direct_dft() {
    let axes = cube(2, 8.0, 64).unwrap();
    let f = random_field(axes.clone(), Representation::Space, 4);
    let fam = GammaFamily::uniform(0, 1, tent()).unwrap();
    let tau = 1.5;
    let got = apply_ttau(&f, tau, &fam).unwrap();
    let hat = direct_dft(f.values(), &[64, 64], -1.0);
    let a = axes[0];
    let mut prod = hat.clone();
    for (i, v) in prod.iter_mut().enumerate() {
        let (k0, k1) = (a.freq(i / 64), a.freq(i % 64));
        let r = (k0 * k0 + k1 * k1).sqrt();
        *v *= (1.0 - 4.0 * (r - tau).abs()).max(0.0);
    }
    let back = direct_dft(&prod, &[64, 64], 1.0);
    for (g, w) in got.values().iter().zip(&back) {
        assert!((g - w / 4096.0).norm() < 1e-9);
    }
}

#[test]
fn modulated_sums() {
    let f = random_field(cube(2, 8.0, 64).unwrap(), Representation::Space, 6);
    let fam = GammaFamily::uniform(0, 2, tent()).unwrap();
    let z = Complex64::new(0.0, 0.0);
    let terms = [SlabTerm { k: 0, tau: 1.3, alpha: z }, SlabTerm { k: 1, tau: 2.9, alpha: z }];
    assert_eq!(apply_modulated_sum(&f, &terms, &fam).unwrap().max_abs(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let single = apply_modulated_sum(&f, &[SlabTerm { k: 1, tau: 2.9, alpha: one }], &fam).unwrap();
    let direct = apply_ttau(&f, 2.9, &fam).unwrap();
    for (a, b) in single.values().iter().zip(direct.values()) {
        assert!((a - b).norm() < 1e-13);
    }
    let both = apply_modulated_sum(
        &f,
        &[SlabTerm { k: 0, tau: 1.3, alpha: one }, SlabTerm { k: 1, tau: 2.9, alpha: -one }],
        &fam,
    )
    .unwrap();
    let a = apply_ttau(&f, 1.3, &fam).unwrap().lp_norm(2.0);
    let b = apply_ttau(&f, 2.9, &fam).unwrap().lp_norm(2.0);
    let l = both.lp_norm(2.0);
    assert!((l * l - a * a - b * b).abs() < 1e-9 * l * l);
    assert!(apply_modulated_sum(&f, &[SlabTerm { k: 0, tau: 2.5, alpha: one }], &fam).is_err());
}

#[test]
fn parseval_bounds() {
    let axes = cube(2, 4.0, 32).unwrap();
    let f = random_field(axes.clone(), Representation::Space, 7);
    let m = random_field(axes.clone(), Representation::Frequency, 8);
    let sup = m.max_abs();
    let out = apply_multiplier(&f, &m).unwrap();
    assert!(out.lp_norm(2.0) <= sup * f.lp_norm(2.0) * (1.0 + 1e-12));
    // equality when |m| is constant on the Fourier support of f
    let band = GridField::symbol(axes.clone(), |k| Complex64::new(if k[0].abs() < 3.0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let g = apply_multiplier(&f, &band).unwrap();
    let c = Complex64::from_polar(1.7, 0.4);
    let m2 = GridField::symbol(axes, |k| if k[0].abs() < 3.0 { c } else { Complex64::new(5.0, 0.0) }).unwrap();
    let out = apply_multiplier(&g, &m2).unwrap();
    assert!((out.lp_norm(2.0) - 1.7 * g.lp_norm(2.0)).abs() < 1e-12 * g.lp_norm(2.0));
}

#[test]
fn radial_in_radial_out() {
    let f = wide_gaussian(64, 8.0, 0.6);
    let out = apply_radial(&f, |r| Complex64::new((-(r - 2.0).powi(2)).exp(), 0.0)).unwrap();
    let n = 64usize;
    let idx = |i: usize, j: usize| i * n + j;
    let mean: f64 = out.values().iter().map(|v| v.norm()).sum::<f64>() / out.len() as f64;
    for i in 1..n {
        for j in 1..n {
            let v = out.values()[idx(i, j)];
            for w in [out.values()[idx(j, i)], out.values()[idx(n - i, j)], out.values()[idx(i, n - j)]] {
                assert!((v - w).norm() <= 1e-8 * mean);
            }
        }
    }
}

#[test]
fn grid_shifts_commute_with_multipliers() {
    let axes = cube(2, 4.0, 32).unwrap();
    let f = random_field(axes.clone(), Representation::Space, 9);
    let m = random_field(axes, Representation::Frequency, 10);
    let a = apply_multiplier(&f.shifted(&[3, -5]).unwrap(), &m).unwrap();
    let b = apply_multiplier(&f, &m).unwrap().shifted(&[3, -5]).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplier_application_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0f64..2.0) {
        let axes = cube(2, 4.0, 16).unwrap();
        let f = random_field(axes.clone(), Representation::Space, s1);
        let g = random_field(axes.clone(), Representation::Space, s2);
        let m = random_field(axes, Representation::Frequency, s1 ^ s2);
        let mut h = f.clone();
        h.add_scaled(&g, Complex64::new(a, 0.0)).unwrap();
        let tf = apply_multiplier(&f, &m).unwrap();
        let tg = apply_multiplier(&g, &m).unwrap();
        let th = apply_multiplier(&h, &m).unwrap();
        for i in 0..th.len() {
            let want = tf.values()[i] + tg.values()[i] * a;
            prop_assert!((th.values()[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn mgamma_support_for_random_tents(hw in 0.01f64..0.25, k_min in -2i32..1, span in 0i32..3) {
        let fam = GammaFamily::uniform(k_min, k_min + span, Profile1d::tent(hw)).unwrap();
        let m = build_mgamma(&fam, vec![Axis::new(4.0, 16).unwrap(), Axis::new(2.0, 32).unwrap()]).unwrap();
        let mut k = [0.0; 2];
        for i in 0..m.field.len() {
            if m.field.values()[i].norm() > 0.0 {
                m.field.freqs_into(i, &mut k);
                let slab = dyadic_slab(k[1]).unwrap();
                prop_assert!(slab >= k_min && slab <= k_min + span);
                prop_assert!((k[0].abs() - k[1]).abs() < 2f64.powi(slab) * hw);
            }
        }
    }
}
