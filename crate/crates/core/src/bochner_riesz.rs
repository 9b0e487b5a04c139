//! Bochner–Riesz cone multipliers `ρ_λ(ξ,τ) = (1 - |ξ|²/τ²)_+^λ`.
//!
//! Near the cone, `ρ_λ` factors as `a_λ(ξ,τ) γ((|ξ|-τ)/2^k)` on the slab
//! `τ ∈ [2^k, 2^{k+1})` with `γ(u) = (-u)^λ b(u)` and
//! `a_λ = (2^k (τ+|ξ|)/τ²)^λ`; the remainder `ρ_λ (1 - b)` is smooth.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bumps::br_cutoff;
use crate::characterization::{divergent_trend, weighted_spectrum_norm, LineSpec};
use crate::error::{domain, Result};
use crate::grid::{Axis, GridField};
use crate::lorentz::LorentzParams;
use crate::multiplier::{br_cone_value, dyadic_slab};
use crate::profile::Profile1d;
use crate::radial_fourier::{dyadic_envelope, fourier_1d_real, loglog_slope};

/// `γ(u) = (-u)^λ b(u)` for `u < 0`, zero for `u >= 0`, with the frozen cutoff `b`.
pub fn br_gamma(lambda: f64) -> Result<Profile1d> {
    br_gamma_with(lambda, Arc::new(br_cutoff))
}

/// [`br_gamma`] with a caller-supplied cutoff `b` (supported in `(-1/4, 4)`).
pub fn br_gamma_with(lambda: f64, b: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Result<Profile1d> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("Bochner–Riesz exponent must be positive, got {lambda}"));
    }
    Ok(Profile1d::new(format!("br_gamma({lambda})"), (-0.25, 0.0), move |u| {
        if u >= 0.0 || u <= -0.25 {
            0.0
        } else {
            (-u).powf(lambda) * b(u)
        }
    })
    .with_kinks(vec![0.0]))
}

/// `d/p - (d+1)/2`.
pub fn critical_lambda(dim: usize, p: f64) -> f64 {
    let d = dim as f64;
    d / p - (d + 1.0) / 2.0
}

/// `d(1/p - 1/2) - 1/2`, the same endpoint written the other way.
pub fn critical_lambda_alt(dim: usize, p: f64) -> f64 {
    let d = dim as f64;
    d * (1.0 / p - 0.5) - 0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayFit {
    /// Fitted `α` in `|γ̂(s)| ≈ C s^{-α}` with the dyadic envelope used.
    Exponent { exponent: f64, envelope: Vec<(f64, f64)> },
    /// `γ̂` vanished identically.
    ZeroInput,
}

impl DecayFit {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            DecayFit::Exponent { exponent, .. } => Some(*exponent),
            DecayFit::ZeroInput => None,
        }
    }
}

/// FFT box for decay fits: half width 1, `2^18` points (Nyquist ≈ 4·10⁵).
pub const DECAY_LINE: LineSpec = LineSpec { half_width: 1.0, n: 1 << 18, truncation: 1.0e4 };

/// Log–log fit of the dyadic-block maxima of `|γ̂(s)|` over `s ∈ [lo, hi]`.
pub fn gamma_hat_decay_fit(gamma: &Profile1d, s_range: (f64, f64), line: &LineSpec) -> Result<DecayFit> {
    let (lo, hi) = s_range;
    if !(lo >= 10.0 && hi <= 1.0e4 && hi > lo) {
        return domain(format!("decay fits use a range inside [10, 1e4], got {s_range:?}"));
    }
    let spectrum = fourier_1d_real(|u| gamma.eval(u), line.half_width, line.n)?;
    // leave a factor 8 of headroom below Nyquist against aliasing
    if 8.0 * hi > spectrum.nyquist() {
        return domain(format!(
            "FFT resolution reaches {:.0}, too low for s up to {hi}",
            spectrum.nyquist()
        ));
    }
    if spectrum.max_abs() == 0.0 {
        return Ok(DecayFit::ZeroInput);
    }
    let pts: Vec<(f64, f64)> = spectrum
        .freqs
        .iter()
        .zip(&spectrum.values)
        .map(|(s, v)| (s.abs(), v.norm()))
        .collect();
    let envelope = dyadic_envelope(&pts, lo, hi);
    if envelope.len() < 2 {
        return domain("decay range spans fewer than two dyadic blocks");
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = envelope.iter().copied().unzip();
    Ok(DecayFit::Exponent { exponent: -loglog_slope(&xs, &ys), envelope })
}

/// Inputs of the critical-exponent scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub line: LineSpec,
    /// Successive doublings of the frequency truncation.
    pub truncations: Vec<f64>,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            line: LineSpec { half_width: 4.0, n: 1 << 19, truncation: 8000.0 },
            truncations: vec![1000.0, 2000.0, 4000.0, 8000.0],
        }
    }
}

/// `λ` from `lo` to `hi` inclusive in steps of `step`.
pub fn lambda_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    /// Weak-type quasi-norm over `|s| <= R` per truncation.
    pub values: Vec<f64>,
    /// Weak-type quasi-norm over `R/2 < |s| <= R` per truncation.
    pub top_blocks: Vec<f64>,
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub dim: usize,
    pub p: f64,
    pub prediction: f64,
    pub prediction_alt: f64,
    /// `|prediction - prediction_alt|`, zero up to rounding.
    pub formula_gap: f64,
    /// Smallest `λ` on the grid without a divergent trend.
    pub estimate: Option<f64>,
    pub points: Vec<ScanPoint>,
}

/// Estimates the smallest `λ` for which the weak-type line functional of
/// `br_gamma(λ)` stays bounded as the truncation doubles.
///
/// Divergence is judged on the top frequency block `R/2 < |s| <= R`, whose
/// weak quasi-norm grows like `2^{λ_c - λ}` per doubling below the critical
/// exponent; the full truncated quasi-norm is dominated by low frequencies
/// until `R` is astronomically large.
pub fn critical_scan(dim: usize, p_list: &[f64], lambdas: &[f64], spec: &ScanSpec) -> Result<Vec<ScanResult>> {
    if dim < 2 {
        return domain(format!("scan needs d >= 2, got {dim}"));
    }
    let upper = 2.0 * (dim as f64 - 1.0) / (dim as f64 + 1.0);
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for &p in p_list {
        if !(p > 1.0 && p < upper) {
            return domain(format!("p = {p} lies outside (1, {upper:.4}) for d = {dim}"));
        }
        let pred = critical_lambda(dim, p);
        if !(lo <= pred && pred <= hi) {
            return domain(format!("λ-grid [{lo}, {hi}] does not bracket the prediction {pred:.4} for p = {p}"));
        }
    }
    if lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("λ-grid must be strictly increasing");
    }
    let top = spec.truncations.iter().copied().fold(0.0, f64::max);
    let nyquist = std::f64::consts::PI * spec.line.n as f64 / (2.0 * spec.line.half_width);
    if top > nyquist {
        return domain(format!("truncation {top} exceeds the FFT Nyquist frequency {nyquist:.0}"));
    }
    let params: Vec<LorentzParams> = p_list.iter().map(|&p| LorentzParams::weak(p)).collect::<Result<_>>()?;
    let mut points: Vec<Vec<ScanPoint>> = vec![Vec::new(); p_list.len()];
    for &lambda in lambdas {
        let g = br_gamma(lambda)?;
        let spectrum = fourier_1d_real(|u| g.eval(u), spec.line.half_width, spec.line.n)?;
        for (pi, par) in params.iter().enumerate() {
            let mut values = Vec::new();
            let mut blocks = Vec::new();
            for &r in &spec.truncations {
                values.push(weighted_spectrum_norm(&spectrum, dim, *par, -1.0, r)?);
                blocks.push(weighted_spectrum_norm(&spectrum, dim, *par, 0.5 * r, r)?);
            }
            let divergent = divergent_trend(&blocks);
            points[pi].push(ScanPoint { lambda, values, top_blocks: blocks, divergent });
        }
    }
    Ok(p_list
        .iter()
        .zip(points)
        .map(|(&p, pts)| {
            let prediction = critical_lambda(dim, p);
            let prediction_alt = critical_lambda_alt(dim, p);
            ScanResult {
                dim,
                p,
                prediction,
                prediction_alt,
                formula_gap: (prediction - prediction_alt).abs(),
                estimate: pts.iter().find(|q| !q.divergent).map(|q| q.lambda),
                points: pts,
            }
        })
        .collect())
}

/// Pieces of `ρ_λ = a_λ·γ-part + ã_λ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splitting {
    pub rho: f64,
    pub a: f64,
    pub gamma_part: f64,
    pub a_tilde: f64,
}

impl Splitting {
    pub fn residual(&self) -> f64 {
        self.rho - self.a * self.gamma_part - self.a_tilde
    }
}

/// Evaluates the splitting at `(|ξ|, τ)`.
pub fn splitting(lambda: f64, gamma: &Profile1d, xi_norm: f64, tau: f64) -> Splitting {
    let rho = br_cone_value(lambda, xi_norm, tau);
    match dyadic_slab(tau) {
        None => Splitting { rho, a: 0.0, gamma_part: 0.0, a_tilde: 0.0 },
        Some(k) => {
            let s = 2f64.powi(k);
            let u = (xi_norm - tau) / s;
            let a = (s * (tau + xi_norm) / (tau * tau)).powf(lambda);
            Splitting { rho, a, gamma_part: gamma.eval(u), a_tilde: rho * (1.0 - br_cutoff(u)) }
        }
    }
}

/// Largest `|ρ_λ - a_λ γ-part - ã_λ|` over the DFT frequencies of a cone grid.
pub fn splitting_residual_max(lambda: f64, axes: Vec<Axis>) -> Result<f64> {
    if axes.len() < 2 {
        return domain("cone grids need a ξ axis and a τ axis");
    }
    let gamma = br_gamma(lambda)?;
    let d = axes.len() - 1;
    let g = GridField::symbol(axes, |k| {
        let xi = k[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        crate::Complex64::new(splitting(lambda, &gamma, xi, k[d]).residual(), 0.0)
    })?;
    Ok(g.max_abs())
}
