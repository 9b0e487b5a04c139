//! Fourier analysis of radial functions.
//!
//! Convention: `F_d f(ξ) = ∫ f(y) e^{-i⟨y,ξ⟩} dy`. For a radial function
//! `m(|·|)` on `R^d`, with `ν = d/2 - 1`,
//!
//! ```text
//! F_d[m(|·|)](ρ) = (2π)^{d/2} ρ^{-ν} ∫_0^∞ m(r) J_ν(rρ) r^{d/2} dr
//!               = (2π)^{d/2} ∫_0^∞ m(r) (J_ν(rρ)/(rρ)^ν) r^{d-1} dr
//! ```
//!
//! and `F_d^{-1} = (2π)^{-d} F_d` on radial functions.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::profile::CubicSpline;
use crate::quadrature::{composite_nodes, PANEL_NODES};
use crate::special::{bessel_j_scaled, BesselOrder};
use crate::Complex64;

/// Marker for the transform convention used by every routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FourierConvention;

impl FourierConvention {
    /// Sign of the exponent in the forward kernel `e^{-i⟨y,ξ⟩}`.
    pub const FORWARD_SIGN: f64 = -1.0;
    /// Factor relating inverse and forward transforms of even functions in `R^d`.
    pub fn inverse_factor(d: usize) -> f64 {
        (2.0 * PI).powi(-(d as i32))
    }
}

/// Samples of `∫ f(s) e^{-isσ} ds` on the FFT-dual grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum1d {
    /// `σ_m = m Δσ`, `m = -N/2, …, N/2 - 1`, ascending.
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `Δσ = π / R`.
    pub spacing: f64,
}

impl Spectrum1d {
    pub fn nyquist(&self) -> f64 {
        -self.freqs[0]
    }

    /// Frequencies and values with `|σ| <= truncation`.
    pub fn truncated(&self, truncation: f64) -> (Vec<f64>, Vec<Complex64>) {
        self.freqs
            .iter()
            .zip(&self.values)
            .filter(|(s, _)| s.abs() <= truncation)
            .map(|(s, v)| (*s, *v))
            .unzip()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Discrete Fourier transform of `f` sampled at `x_j = -R + jh`, `h = 2R/N`.
///
/// The left endpoint is sampled and the right one is not, so for `f`
/// vanishing at `±R` this is the trapezoidal rule. Accuracy is spectral for
/// smooth compactly supported `f`; `f` must be negligible outside `[-R, R]`.
pub fn fourier_1d<F>(f: F, half_width: f64, n: usize) -> Result<Spectrum1d>
where
    F: Fn(f64) -> Complex64,
{
    if !n.is_power_of_two() || n < 2 {
        return domain(format!("FFT length must be a power of two, got {n}"));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return domain(format!("half width must be positive, got {half_width}"));
    }
    let h = 2.0 * half_width / n as f64;
    let mut buf = Vec::with_capacity(n);
    for j in 0..n {
        let x = -half_width + j as f64 * h;
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { at: x, value: if v.re.is_finite() { v.im } else { v.re } });
        }
        buf.push(v);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let spacing = PI / half_width;
    let half = n / 2;
    let mut freqs = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        // ascending order: m = k - N/2
        let m = k as i64 - half as i64;
        let idx = m.rem_euclid(n as i64) as usize;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        freqs.push(m as f64 * spacing);
        values.push(buf[idx] * (h * sign));
    }
    Ok(Spectrum1d { freqs, values, spacing })
}

/// Real-input convenience wrapper around [`fourier_1d`].
pub fn fourier_1d_real<F>(f: F, half_width: f64, n: usize) -> Result<Spectrum1d>
where
    F: Fn(f64) -> f64,
{
    fourier_1d(|x| Complex64::new(f(x), 0.0), half_width, n)
}

/// Samples of a radial function of `|x|` in `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<Complex64>,
    dim: usize,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<Complex64>, dim: usize) -> Result<Self> {
        if dim < 2 {
            return domain(format!("radial profiles need dim >= 2, got {dim}"));
        }
        if radii.len() != values.len() || radii.is_empty() {
            return domain("radial profile needs matching, nonempty radii and values");
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("radii must be nonnegative and strictly increasing");
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return domain("radial profile values must be finite");
        }
        Ok(Self { radii, values, dim })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Direction of a radial transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Quadrature controls for [`radial_transform_fn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTransformOptions {
    pub direction: Direction,
    /// Oscillation frequency of the profile itself (e.g. `1` for `e^{ir}`),
    /// added to the Bessel frequency when sizing panels.
    pub profile_frequency: f64,
    /// Upper bound on the panel length regardless of oscillation.
    pub max_panel: f64,
    /// Gauss–Legendre nodes per oscillation period (at least 8).
    pub nodes_per_period: usize,
    /// Maximum number of quadrature nodes; radii needing more are flagged.
    pub node_budget: usize,
}

impl Default for RadialTransformOptions {
    fn default() -> Self {
        Self {
            direction: Direction::Inverse,
            profile_frequency: 0.0,
            max_panel: 0.25,
            nodes_per_period: 16,
            node_budget: 4_000_000,
        }
    }
}

impl RadialTransformOptions {
    pub fn forward() -> Self {
        Self { direction: Direction::Forward, ..Self::default() }
    }

    pub fn inverse() -> Self {
        Self::default()
    }
}

/// Transform values with a per-radius reliability flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTransformOutput {
    pub profile: RadialProfile,
    /// `false` where the radius needs more quadrature nodes than the budget
    /// allows (or exceeds the sampling limit of a tabulated input); the value
    /// there is `NaN`.
    pub reliable: Vec<bool>,
}

impl RadialTransformOutput {
    pub fn all_reliable(&self) -> bool {
        self.reliable.iter().all(|&r| r)
    }

    /// Errors out if any radius was flagged.
    pub fn require_reliable(self) -> Result<RadialProfile> {
        if let Some(i) = self.reliable.iter().position(|r| !r) {
            return Err(Error::Budget(format!(
                "radial transform unreliable at radius {}",
                self.profile.radii[i]
            )));
        }
        Ok(self.profile)
    }
}

/// Quadrature nodes on `[a, b]` for kernels oscillating at frequency `<= freq`.
pub fn oscillatory_nodes(
    support: (f64, f64),
    kinks: &[f64],
    freq: f64,
    max_panel: f64,
    nodes_per_period: usize,
) -> (Vec<f64>, Vec<f64>) {
    let per_period = nodes_per_period.max(8) as f64;
    let period_panel = if freq > 0.0 {
        2.0 * PI / freq * PANEL_NODES as f64 / per_period
    } else {
        f64::INFINITY
    };
    composite_nodes(support.0, support.1, kinks, period_panel.min(max_panel))
}

/// Radial transform of `f(|·|)` on `R^dim`, evaluated at `out_radii`.
///
/// `f` is integrated over `support` with panels split at `kinks`.
pub fn radial_transform_fn<F>(
    f: F,
    support: (f64, f64),
    kinks: &[f64],
    dim: usize,
    out_radii: &[f64],
    opts: RadialTransformOptions,
) -> Result<RadialTransformOutput>
where
    F: Fn(f64) -> Complex64,
{
    let order = BesselOrder::for_dimension(dim)?;
    if !(support.0 >= 0.0 && support.1 >= support.0) {
        return domain(format!("radial support must lie in [0, ∞), got {support:?}"));
    }
    if out_radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return domain("output radii must be finite and nonnegative");
    }
    let prefactor = (2.0 * PI).powf(dim as f64 / 2.0)
        * match opts.direction {
            Direction::Forward => 1.0,
            Direction::Inverse => FourierConvention::inverse_factor(dim),
        };
    let len = support.1 - support.0;
    let per_period = opts.nodes_per_period.max(8) as f64;
    let nodes_needed = |rho: f64| {
        let freq = rho + opts.profile_frequency;
        len * freq * per_period / (2.0 * PI)
    };
    let mut reliable: Vec<bool> =
        out_radii.iter().map(|&r| nodes_needed(r) <= opts.node_budget as f64).collect();
    let rho_max = out_radii
        .iter()
        .zip(&reliable)
        .filter(|(_, ok)| **ok)
        .map(|(r, _)| *r)
        .fold(0.0, f64::max);
    let (xs, ws) = oscillatory_nodes(
        support,
        kinks,
        rho_max + opts.profile_frequency,
        opts.max_panel,
        opts.nodes_per_period,
    );
    let weighted: Vec<Complex64> = xs
        .iter()
        .zip(&ws)
        .map(|(&r, &w)| f(r) * (w * r.powi(dim as i32 - 1)))
        .collect();
    let mut values = Vec::with_capacity(out_radii.len());
    for (i, &rho) in out_radii.iter().enumerate() {
        if !reliable[i] {
            values.push(Complex64::new(f64::NAN, f64::NAN));
            continue;
        }
        let s: Complex64 = xs
            .iter()
            .zip(&weighted)
            .map(|(&r, &fw)| fw * bessel_j_scaled(order, r * rho))
            .sum();
        let v = s * prefactor;
        if !(v.re.is_finite() && v.im.is_finite()) {
            reliable[i] = false;
        }
        values.push(v);
    }
    // the profile constructor rejects NaN, so build it directly
    let profile = RadialProfile { radii: out_radii.to_vec(), values, dim };
    if profile.radii.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("output radii must be strictly increasing");
    }
    Ok(RadialTransformOutput { profile, reliable })
}

/// Radial transform of a tabulated profile (cubic-spline interpolation,
/// zero beyond the last radius).
pub fn radial_transform(
    profile: &RadialProfile,
    out_radii: &[f64],
    opts: RadialTransformOptions,
) -> Result<RadialTransformOutput> {
    let re = CubicSpline::new(profile.radii.clone(), profile.values.iter().map(|v| v.re).collect())?;
    let im = CubicSpline::new(profile.radii.clone(), profile.values.iter().map(|v| v.im).collect())?;
    let lo = profile.radii[0];
    let hi = *profile.radii.last().unwrap();
    let max_gap = profile.radii.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let f = |r: f64| {
        if r > hi {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(re.eval(r), im.eval(r))
        }
    };
    let opts = RadialTransformOptions { max_panel: opts.max_panel.min(max_gap.max(1e-12)), ..opts };
    let mut out = radial_transform_fn(f, (0.0f64.min(lo), hi), &profile.radii, profile.dim, out_radii, opts)?;
    // tabulated data cannot resolve oscillations finer than its spacing
    let limit = PI / max_gap;
    for (i, r) in out_radii.iter().enumerate() {
        if *r > limit {
            out.reliable[i] = false;
            out.profile.values[i] = Complex64::new(f64::NAN, f64::NAN);
        }
    }
    Ok(out)
}

/// `F_d[σ_r](ξ) = (2π)^{d/2} r^{d-1} (r|ξ|)^{1-d/2} J_{d/2-1}(r|ξ|)` at one point.
pub fn sphere_measure_hat(r: f64, dim: usize, xi: f64) -> f64 {
    let order = BesselOrder::for_dimension(dim).expect("dim >= 2");
    (2.0 * PI).powf(dim as f64 / 2.0) * r.powi(dim as i32 - 1) * bessel_j_scaled(order, r * xi)
}

/// Radial profile of the Fourier transform of surface measure on the sphere of radius `r`.
pub fn sphere_measure_transform(r: f64, dim: usize, xi_radii: &[f64]) -> Result<RadialProfile> {
    if !(r.is_finite() && r > 0.0) {
        return domain(format!("sphere radius must be positive, got {r}"));
    }
    BesselOrder::for_dimension(dim)?;
    let values = xi_radii
        .iter()
        .map(|&xi| Complex64::new(sphere_measure_hat(r, dim, xi), 0.0))
        .collect();
    RadialProfile::new(xi_radii.to_vec(), values, dim)
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let ratio = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|i| a * (ratio * i as f64).exp()).collect()
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(b > a && n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Dyadic-block envelope `(block start, max |v| in block)` over `[lo, hi]`.
pub fn dyadic_envelope(points: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi * (1.0 - 1e-12) {
        let b = (2.0 * a).min(hi);
        let m = points
            .iter()
            .filter(|(s, _)| *s >= a && *s < b)
            .map(|(_, v)| *v)
            .fold(f64::NAN, f64::max);
        if m.is_finite() {
            out.push((a, m));
        }
        a = b;
    }
    out
}
