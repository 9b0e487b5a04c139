//! Wave kernels as superpositions of sphere measures, and smoothed shell
//! operators.
//!
//! `K_n = F_d^{-1}[e^{±i|·|} ϑ(2^{-n}|·|)]` concentrates near the unit sphere.
//! Its restriction to the annulus `1/2 < |x| < 2`, rescaled by
//! `2^{-n(d-1)/2}`, is the radial density `ω_n`; a superposition
//! `∫ ω(ρ) σ_ρ dρ` of sphere measures has density `ω(|x|)`, so `K_n` splits
//! exactly into `2^{n(d-1)/2} ∫ ω_n(ρ) σ_ρ dρ` plus the remainder `Ẽ_n` off the
//! annulus.
//!
//! The smoothing kernel is `ψ = ψ∘ * ψ∘` with `ψ∘ = c Δ^M B(|·|/r₀)`, `B` the
//! standard mollifier, normalised so that `ψ̂∘(1) = 1`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bumps::mollifier;
use crate::error::{domain, Result};
use crate::grid::{GridField, Representation};
use crate::opnorm::{OpNormEstimate, WitnessRecord};
use crate::profile::{CubicSpline, Profile1d};
use crate::quadrature::composite_nodes;
use crate::radial_fourier::{
    loglog_slope, radial_transform_fn, sphere_measure_hat, Direction, RadialProfile, RadialTransformOptions,
};
use crate::special::{bessel_j_scaled, sphere_area, BesselOrder};
use crate::Complex64;

pub const DEFAULT_MOMENT_ORDER: usize = 3;
pub const DEFAULT_RADIUS0: f64 = 1.0 / 16.0;
/// Lower bound required for `|ψ̂∘|` on `1/8 <= |ξ| <= 8`.
pub const NONVANISHING_MARGIN: f64 = 1e-6;
/// Largest wave-kernel index accepted.
pub const MAX_WAVE_INDEX: u32 = 12;
/// Largest radius at which wave kernels are evaluated.
pub const WAVE_RADIUS_LIMIT: f64 = 16.0;

const TABLE_STEP: f64 = 1.0 / 16.0;
const TABLE_ETA_MAX: f64 = 160.0;

fn mollifier_hat_direct(dim: usize, etas: &[f64]) -> Result<Vec<f64>> {
    let out = radial_transform_fn(
        |r| Complex64::new(mollifier(r), 0.0),
        (0.0, 1.0),
        &[],
        dim,
        etas,
        RadialTransformOptions::forward(),
    )?
    .require_reliable()?;
    Ok(out.values().iter().map(|v| v.re).collect())
}

/// Spline table of `F_d[B(|·|)](η)` on `[0, 160]`, built once per dimension.
fn mollifier_hat_table(dim: usize) -> Result<Arc<CubicSpline>> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<CubicSpline>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = tables.lock().expect("table lock").get(&dim) {
        return Ok(t.clone());
    }
    let n = (TABLE_ETA_MAX / TABLE_STEP).round() as usize;
    let etas: Vec<f64> = (0..=n).map(|i| i as f64 * TABLE_STEP).collect();
    let values = mollifier_hat_direct(dim, &etas)?;
    let spline = Arc::new(CubicSpline::new(etas, values)?);
    tables.lock().expect("table lock").insert(dim, spline.clone());
    Ok(spline)
}

/// Polynomial in `(u, w)` with `w = 1/(1-u)`, standing for `P(u, w) e^{-w}`.
#[derive(Debug, Clone, PartialEq)]
struct ExpPoly {
    // coef[i][j] multiplies u^i w^j
    coef: Vec<Vec<f64>>,
}

impl ExpPoly {
    fn one() -> Self {
        Self { coef: vec![vec![1.0]] }
    }

    fn zeros(ni: usize, nj: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; nj]; ni]
    }

    /// `d/du`, using `dw/du = w²`.
    fn derivative(&self) -> Self {
        let ni = self.coef.len();
        let nj = self.coef[0].len();
        let mut out = Self::zeros(ni, nj + 2);
        for i in 0..ni {
            for j in 0..nj {
                let c = self.coef[i][j];
                if c == 0.0 {
                    continue;
                }
                if i > 0 {
                    out[i - 1][j] += i as f64 * c;
                }
                out[i][j + 1] += j as f64 * c;
                out[i][j + 2] -= c;
            }
        }
        Self { coef: out }
    }

    /// Laplacian in `R^d` of `f(|y|²)`: `4u f'' + 2d f'`.
    fn laplacian(&self, dim: usize) -> Self {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let ni = d2.coef.len() + 1;
        let nj = d2.coef[0].len();
        let mut out = Self::zeros(ni, nj);
        for (i, row) in d2.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out[i + 1][j] += 4.0 * c;
            }
        }
        for (i, row) in d1.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out[i][j] += 2.0 * dim as f64 * c;
            }
        }
        Self { coef: out }
    }

    fn eval(&self, u: f64) -> f64 {
        if !(u < 1.0) {
            return 0.0;
        }
        let w = 1.0 / (1.0 - u);
        let e = (-w).exp();
        if e == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        let mut ui = 1.0;
        for row in &self.coef {
            let mut wj = 1.0;
            for c in row {
                s += c * ui * wj;
                wj *= w;
            }
            ui *= u;
        }
        s * e
    }
}

/// `ψ∘` and `ψ = ψ∘ * ψ∘` through their radial Fourier profiles.
#[derive(Debug, Clone)]
pub struct SmoothingKernel {
    dim: usize,
    moment_order: usize,
    radius0: f64,
    table: Arc<CubicSpline>,
    hat_at_radius0: f64,
    spatial: ExpPoly,
}

impl SmoothingKernel {
    /// Builds the kernel and checks `|ψ̂∘| >= 1e-6` on `[1/8, 8]`.
    pub fn new(dim: usize, moment_order: usize, radius0: f64) -> Result<Self> {
        if dim < 2 {
            return domain(format!("smoothing kernels need d >= 2, got {dim}"));
        }
        if moment_order == 0 {
            return domain("moment order must be at least 1");
        }
        if !(radius0 > 0.0 && radius0 <= 1.0) {
            return domain(format!("radius must lie in (0, 1], got {radius0}"));
        }
        let table = mollifier_hat_table(dim)?;
        let mut spatial = ExpPoly::one();
        for _ in 0..moment_order {
            spatial = spatial.laplacian(dim);
        }
        let mut k = Self { dim, moment_order, radius0, table, hat_at_radius0: 1.0, spatial };
        k.hat_at_radius0 = k.mollifier_hat(radius0);
        let margin = k.band_minimum();
        if !(margin >= NONVANISHING_MARGIN) {
            return domain(format!(
                "|ψ̂∘| drops to {margin:.3e} on [1/8, 8], below the margin {NONVANISHING_MARGIN:e}"
            ));
        }
        Ok(k)
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        Self::new(dim, DEFAULT_MOMENT_ORDER, DEFAULT_RADIUS0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moment_order(&self) -> usize {
        self.moment_order
    }

    pub fn radius0(&self) -> f64 {
        self.radius0
    }

    fn mollifier_hat(&self, eta: f64) -> f64 {
        if eta <= TABLE_ETA_MAX {
            self.table.eval(eta)
        } else {
            mollifier_hat_direct(self.dim, &[eta]).map(|v| v[0]).unwrap_or(0.0)
        }
    }

    /// `ψ̂∘(ξ) = |ξ|^{2M} B̂(r₀|ξ|) / B̂(r₀)`.
    pub fn psi_circ_hat(&self, xi: f64) -> f64 {
        xi.powi(2 * self.moment_order as i32) * self.mollifier_hat(self.radius0 * xi) / self.hat_at_radius0
    }

    /// `ψ̂ = ψ̂∘²`.
    pub fn psi_hat(&self, xi: f64) -> f64 {
        self.psi_circ_hat(xi).powi(2)
    }

    /// `min |ψ̂∘|` over 2001 log-spaced points of `[1/8, 8]`.
    pub fn band_minimum(&self) -> f64 {
        (0..=2000)
            .map(|i| 0.125 * 64f64.powf(i as f64 / 2000.0))
            .map(|xi| self.psi_circ_hat(xi).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `ψ∘(x) = c Δ^M[B(|·|/r₀)](x)`, zero for `|x| >= r₀`.
    pub fn psi_circ(&self, r: f64) -> f64 {
        let m = self.moment_order as i32;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign / (self.radius0.powi(self.dim as i32) * self.hat_at_radius0);
        c * self.radius0.powi(-2 * m) * self.spatial.eval((r / self.radius0).powi(2))
    }

    /// `ψ∘` as a profile on `[0, r₀]`.
    pub fn psi_circ_profile(&self) -> Profile1d {
        let k = self.clone();
        Profile1d::new("psi_circ", (0.0, self.radius0), move |r| k.psi_circ(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSign {
    Plus,
    Minus,
}

impl WaveSign {
    pub fn value(self) -> f64 {
        match self {
            WaveSign::Plus => 1.0,
            WaveSign::Minus => -1.0,
        }
    }
}

/// The default cutoff `ϑ` as a profile on `(1/8, 8)`.
pub fn default_theta() -> Profile1d {
    Profile1d::new("theta", (0.125, 8.0), crate::bumps::wave_cutoff)
}

/// Radii for kernel `n`: step `1/16` off the annulus, `2^{-n}/16` (at most
/// `1/64`) at midpoints inside `(1/2, 2)`.
pub fn wave_radii(n: u32) -> Vec<f64> {
    let coarse = 1.0 / 16.0;
    let mut out: Vec<f64> = (0..=8).map(|i| i as f64 * coarse).collect();
    let fine = (2f64.powi(-(n as i32)) / 16.0).min(1.0 / 64.0);
    let m = (1.5 / fine).round() as usize;
    out.extend((0..m).map(|i| 0.5 + (i as f64 + 0.5) * fine));
    out.extend((0..=224).map(|i| 2.0 + i as f64 * coarse));
    out
}

/// `K_n(x) = F_d^{-1}[e^{±i|·|} ϑ(2^{-n}|·|)](x)` at the given radii.
pub fn wave_kernel(n: u32, dim: usize, theta: &Profile1d, sign: WaveSign, radii: &[f64]) -> Result<RadialProfile> {
    if n < 1 || n > MAX_WAVE_INDEX {
        return domain(format!("wave index must lie in 1..={MAX_WAVE_INDEX}, got {n}"));
    }
    let (lo, hi) = theta.support();
    if lo < 0.125 || hi > 8.0 {
        return domain(format!("ϑ must be supported in (1/8, 8), got {:?}", theta.support()));
    }
    if radii.iter().any(|r| *r > WAVE_RADIUS_LIMIT) {
        return domain(format!("wave kernels are evaluated for |x| <= {WAVE_RADIUS_LIMIT}"));
    }
    let scale = 2f64.powi(n as i32);
    let s = sign.value();
    let th = theta.clone();
    let opts = RadialTransformOptions {
        direction: Direction::Inverse,
        profile_frequency: 1.0,
        node_budget: 8_000_000,
        ..RadialTransformOptions::default()
    };
    let kinks: Vec<f64> = theta.kinks().iter().map(|k| k * scale).collect();
    radial_transform_fn(
        move |r| Complex64::from_polar(th.eval(r / scale), s * r),
        (lo * scale, hi * scale),
        &kinks,
        dim,
        radii,
        opts,
    )?
    .require_reliable()
}

/// Splitting of one wave kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveDecomposition {
    pub n: u32,
    pub dim: usize,
    /// `(ρ, ω_n(ρ))` for `1/2 < ρ < 2`.
    pub omega: Vec<(f64, Complex64)>,
    /// `(|x|, Ẽ_n(x))` off the annulus.
    pub error: Vec<(f64, Complex64)>,
    /// `∫ |ω_n(ρ)| dρ` (midpoint rule).
    pub omega_l1: f64,
    /// `sup |Ẽ_n|` over `|x| <= 1/4` or `|x| >= 4`.
    pub error_sup: f64,
    /// Fitted `α` in `|Ẽ_n(x)| ≲ (1+|x|)^{-α}` over `4 <= |x| <= 16`.
    pub error_tail_exponent: f64,
}

impl WaveDecomposition {
    /// `K_n` rebuilt from the two parts.
    pub fn reconstruct(&self) -> Vec<(f64, Complex64)> {
        let amp = 2f64.powf(self.n as f64 * (self.dim as f64 - 1.0) / 2.0);
        let mut out: Vec<(f64, Complex64)> = self.omega.iter().map(|(r, w)| (*r, w * amp)).collect();
        out.extend_from_slice(&self.error);
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

fn tail_exponent(points: &[(f64, f64)]) -> f64 {
    let env = crate::radial_fourier::dyadic_envelope(points, 4.0, 16.0);
    if env.len() < 2 || env.iter().any(|(_, v)| *v <= 0.0) {
        return f64::NAN;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = env.iter().map(|(a, v)| (1.0 + a, *v)).unzip();
    -loglog_slope(&x, &y)
}

pub fn decompose(n: u32, dim: usize, theta: &Profile1d, sign: WaveSign) -> Result<WaveDecomposition> {
    let radii = wave_radii(n);
    let k = wave_kernel(n, dim, theta, sign, &radii)?;
    let amp = 2f64.powf(-(n as f64) * (dim as f64 - 1.0) / 2.0);
    let mut omega = Vec::new();
    let mut error = Vec::new();
    for (&r, &v) in k.radii().iter().zip(k.values()) {
        if r > 0.5 && r < 2.0 {
            omega.push((r, v * amp));
        } else {
            error.push((r, v));
        }
    }
    let fine = if omega.len() > 1 { omega[1].0 - omega[0].0 } else { 0.0 };
    let omega_l1 = omega.iter().map(|(_, w)| w.norm()).sum::<f64>() * fine;
    let error_sup = error
        .iter()
        .filter(|(r, _)| *r <= 0.25 || *r >= 4.0)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let tail: Vec<(f64, f64)> = error.iter().filter(|(r, _)| *r >= 4.0).map(|(r, v)| (*r, v.norm())).collect();
    Ok(WaveDecomposition { n, dim, omega, error, omega_l1, error_sup, error_tail_exponent: tail_exponent(&tail) })
}

/// Decompositions over a range of `n` with uniformity and decay summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveCheck {
    pub dim: usize,
    pub decompositions: Vec<WaveDecomposition>,
    /// `max_n ∫|ω_n| / min_n ∫|ω_n|`.
    pub omega_l1_ratio: f64,
    /// `-` slope of `log2 sup|Ẽ_n|` against `n`.
    pub error_decay_rate: f64,
    /// The same slope after dividing by `2^{n(d+1)/2}`.
    pub normalized_error_decay_rate: f64,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn wave_check(ns: &[u32], dim: usize, theta: &Profile1d, sign: WaveSign) -> Result<WaveCheck> {
    let decompositions: Vec<WaveDecomposition> =
        ns.iter().map(|&n| decompose(n, dim, theta, sign)).collect::<Result<_>>()?;
    WaveCheck::from_decompositions(dim, decompositions)
}

impl WaveCheck {
    /// Summary statistics over decompositions computed elsewhere, in
    /// increasing `n`.
    pub fn from_decompositions(dim: usize, decompositions: Vec<WaveDecomposition>) -> Result<WaveCheck> {
        if decompositions.len() < 2 {
            return domain("a wave check needs at least two values of n");
        }
        if decompositions.iter().any(|w| w.dim != dim) {
            return domain("decompositions of mixed dimension");
        }
        let l1: Vec<f64> = decompositions.iter().map(|w| w.omega_l1).collect();
        let max = l1.iter().copied().fold(0.0, f64::max);
        let min = l1.iter().copied().fold(f64::INFINITY, f64::min);
        let xs: Vec<f64> = decompositions.iter().map(|w| w.n as f64).collect();
        let ys: Vec<f64> = decompositions.iter().map(|w| w.error_sup.log2()).collect();
        let half = (dim as f64 + 1.0) / 2.0;
        let yn: Vec<f64> = ys.iter().zip(&xs).map(|(y, n)| y - half * n).collect();
        Ok(WaveCheck {
            dim,
            omega_l1_ratio: max / min,
            error_decay_rate: -slope(&xs, &ys),
            normalized_error_decay_rate: -slope(&xs, &yn),
            decompositions,
        })
    }
}

/// `g * ψ * σ_r` on the grid of `g`, computed in frequency.
pub fn shell_convolve(g: &GridField, r: f64, kernel: &SmoothingKernel) -> Result<GridField> {
    if g.representation() != Representation::Space {
        return domain("shell convolution expects a field in the space representation");
    }
    if g.ndim() != kernel.dim() {
        return domain(format!("field has {} axes, kernel is {}-dimensional", g.ndim(), kernel.dim()));
    }
    if let Some(a) = g.axes().iter().find(|a| a.cell() > kernel.radius0() / 4.0) {
        return domain(format!(
            "cell {} does not resolve ψ (needs at most r₀/4 = {})",
            a.cell(),
            kernel.radius0() / 4.0
        ));
    }
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("shell radius must be positive, got {r}"));
    }
    let dim = g.ndim();
    let mut hat = g.to_frequency()?;
    let mut k = vec![0.0; dim];
    for i in 0..hat.len() {
        hat.freqs_into(i, &mut k);
        let xi = k.iter().map(|x| x * x).sum::<f64>().sqrt();
        let m = kernel.psi_hat(xi) * sphere_measure_hat(r, dim, xi);
        hat.values_mut()[i] *= m;
    }
    hat.to_space()
}

/// Discretisation of the superposition operator
/// `h ↦ ∫∫ h(y,r) (σ_r * ψ)(· - y) dr dy` on radial witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphSpec {
    /// Largest shell radius `R_max`; shells fill `[1, R_max]`.
    pub r_max: f64,
    /// Number of shells (at most 64).
    pub n_radii: usize,
    /// Width `s` of the Gaussian profile `β(y) = e^{-|y|²/(2s²)}`.
    pub beta_width: f64,
    /// Spacing of the radial output grid.
    pub out_spacing: f64,
}

impl Default for SphSpec {
    fn default() -> Self {
        Self { r_max: 8.0, n_radii: 32, beta_width: 0.125, out_spacing: 1.0 / 48.0 }
    }
}

/// Output profiles of the unit witnesses `β(y) 1_{shell j}(r)`.
struct SphEngine {
    dim: usize,
    radii: Vec<f64>,
    dr: f64,
    out_weights: Vec<f64>,
    /// `basis[j][i]`: output at radius `i` of shell `j`.
    basis: Vec<Vec<f64>>,
    beta_norm_p: f64,
}

impl SphEngine {
    fn new(dim: usize, p: f64, spec: &SphSpec, kernel: &SmoothingKernel) -> Result<Self> {
        let s = spec.beta_width;
        let n = spec.n_radii;
        let dr = (spec.r_max - 1.0) / n as f64;
        let radii: Vec<f64> = (0..n).map(|j| 1.0 + (j as f64 + 0.5) * dr).collect();
        let beta_hat = |xi: f64| (2.0 * PI * s * s).powf(dim as f64 / 2.0) * (-0.5 * s * s * xi * xi).exp();
        // frequency cutoff where β̂ψ̂ has fallen below 1e-16 of its peak
        let mut peak = 0.0f64;
        let mut xi_max = 0.0;
        let mut xi = 0.5;
        while xi < 4000.0 {
            let v = (beta_hat(xi) * kernel.psi_hat(xi)).abs();
            peak = peak.max(v);
            if v > 1e-16 * peak {
                xi_max = xi;
            }
            xi += 0.5;
        }
        let x_max = spec.r_max + 2.0 * kernel.radius0() + 8.0 * s;
        let freq = x_max + spec.r_max;
        let panel = (2.0 * PI / freq).min(0.25);
        let (nodes, weights) = composite_nodes(0.0, xi_max + 1.0, &[], panel);
        let h = spec.out_spacing;
        let n_out = (x_max / h).ceil() as usize;
        let xs: Vec<f64> = (0..n_out).map(|i| (i as f64 + 0.5) * h).collect();
        let area = sphere_area(dim);
        let out_weights: Vec<f64> = xs.iter().map(|x| area * x.powi(dim as i32 - 1) * h).collect();
        let order = BesselOrder::for_dimension(dim)?;
        let pref = (2.0 * PI).powf(dim as f64 / 2.0) * (2.0 * PI).powi(-(dim as i32));
        let common: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .map(|(&xi, &w)| pref * w * xi.powi(dim as i32 - 1) * beta_hat(xi) * kernel.psi_hat(xi) * dr)
            .collect();
        let kern: Vec<Vec<f64>> =
            xs.iter().map(|&x| nodes.iter().map(|&xi| bessel_j_scaled(order, xi * x)).collect()).collect();
        let mut basis = Vec::with_capacity(n);
        for &r in &radii {
            let g: Vec<f64> = nodes.iter().zip(&common).map(|(&xi, c)| c * sphere_measure_hat(r, dim, xi)).collect();
            basis.push(kern.iter().map(|row| row.iter().zip(&g).map(|(a, b)| a * b).sum()).collect());
        }
        let beta_norm_p = (2.0 * PI * s * s / p).powf(dim as f64 / 2.0);
        Ok(Self { dim, radii, dr, out_weights, basis, beta_norm_p })
    }

    fn ratio(&self, c: &[f64], p: f64) -> f64 {
        let n_out = self.out_weights.len();
        let mut out = vec![0.0; n_out];
        for (cj, row) in c.iter().zip(&self.basis) {
            if *cj == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(row) {
                *o += cj * b;
            }
        }
        let num: f64 = out.iter().zip(&self.out_weights).map(|(v, w)| v.abs().powf(p) * w).sum();
        let den: f64 = c
            .iter()
            .zip(&self.radii)
            .map(|(cj, r)| cj.abs().powf(p) * self.beta_norm_p * r.powi(self.dim as i32 - 1) * self.dr)
            .sum();
        if den == 0.0 {
            0.0
        } else {
            (num / den).powf(1.0 / p)
        }
    }
}

/// Lower bound for the `L^p(dy r^{d-1}dr) → L^p(R^d)` norm of the shell
/// superposition operator, maximised over single shells, radial bumps in `r`
/// and random sign patterns (in that order, truncated at `budget`).
pub fn sph_opnorm_lower(dim: usize, p: f64, spec: &SphSpec, budget: usize, seed: u64) -> Result<OpNormEstimate> {
    if !(2..=4).contains(&dim) {
        return domain(format!("shell probes run in d = 2, 3, 4, got {dim}"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("p must be at least 1, got {p}"));
    }
    if !(spec.r_max > 1.0 && spec.n_radii >= 1 && spec.n_radii <= 64) {
        return domain("shell grid needs R_max > 1 and 1 to 64 shells");
    }
    if budget == 0 {
        return domain("budget must be at least 1");
    }
    let kernel = SmoothingKernel::default_for(dim)?;
    let engine = SphEngine::new(dim, p, spec, &kernel)?;
    let n = spec.n_radii;
    let mut witnesses: Vec<(WitnessRecord, Vec<f64>)> = Vec::new();
    for j in 0..n {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        witnesses.push((WitnessRecord::new("single_shell").with("radius", engine.radii[j]), c));
    }
    for width in [0.5, 1.0, 2.0, 4.0] {
        for j in (0..n).step_by(4.max(n / 8)) {
            let rc = engine.radii[j];
            let c = engine.radii.iter().map(|r| (-((r - rc) / width).powi(2)).exp()).collect();
            witnesses.push((WitnessRecord::new("radial_bump").with("center", rc).with("width", width), c));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while witnesses.len() < budget {
        let c: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let idx = witnesses.len() as f64;
        witnesses.push((WitnessRecord::new("random_signs").with("draw", idx), c));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, (_, c)) in witnesses.iter().take(budget).enumerate() {
        let r = engine.ratio(c, p);
        if r > best.0 {
            best = (r, i);
        }
    }
    Ok(OpNormEstimate {
        lower_bound: best.0,
        witness: witnesses[best.1].0.clone(),
        p,
        nu: Some(p),
        budget,
        evaluated: budget.min(witnesses.len()),
        skipped: 0,
        seed,
        grid_witness: None,
    })
}

/// `‖β * ψ * σ_r‖_p` from the radial engine, for cross-checks against grid
/// computations. Needs `r > 1`.
pub fn shell_profile_norm(dim: usize, p: f64, r: f64, beta_width: f64) -> Result<f64> {
    if !(r > 1.0) {
        return domain(format!("shell radius must exceed 1, got {r}"));
    }
    let spec = SphSpec { r_max: 2.0 * r - 1.0, n_radii: 1, beta_width, out_spacing: 1.0 / 96.0 };
    let kernel = SmoothingKernel::default_for(dim)?;
    let engine = SphEngine::new(dim, p, &spec, &kernel)?;
    let num: f64 = engine.basis[0]
        .iter()
        .zip(&engine.out_weights)
        .map(|(v, w)| (v / engine.dr).abs().powf(p) * w)
        .sum();
    Ok(num.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_poly_derivative_matches_finite_difference() {
        let p = ExpPoly::one().laplacian(3);
        let q = ExpPoly::one().derivative();
        let h = 1e-6;
        for u in [0.1, 0.4, 0.7] {
            let fd = (ExpPoly::one().eval(u + h) - ExpPoly::one().eval(u - h)) / (2.0 * h);
            assert!((q.eval(u) - fd).abs() < 1e-8);
        }
        assert_eq!(p.eval(1.0), 0.0);
    }

    #[test]
    fn kernel_invariants() {
        let k = SmoothingKernel::default_for(3).unwrap();
        assert!((k.psi_circ_hat(1.0) - 1.0).abs() < 1e-12);
        assert_eq!(k.psi_circ_hat(0.0), 0.0);
        assert!(k.band_minimum() >= NONVANISHING_MARGIN);
        for xi in [0.3, 2.0, 17.0] {
            assert_eq!(k.psi_hat(xi), k.psi_circ_hat(xi).powi(2));
        }
        assert_eq!(k.psi_circ(0.07), 0.0);
    }

    #[test]
    fn high_moment_order_fails_margin() {
        assert!(SmoothingKernel::new(3, 5, DEFAULT_RADIUS0).is_err());
    }

    #[test]
    fn wave_index_limits() {
        let th = default_theta();
        assert!(wave_kernel(0, 3, &th, WaveSign::Plus, &[1.0]).is_err());
        assert!(wave_kernel(13, 3, &th, WaveSign::Plus, &[1.0]).is_err());
        assert!(wave_kernel(2, 3, &th, WaveSign::Plus, &[17.0]).is_err());
    }

    #[test]
    fn radii_are_increasing() {
        for n in 1..10 {
            let r = wave_radii(n);
            assert!(r.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(*r.last().unwrap(), 16.0);
        }
    }
}
