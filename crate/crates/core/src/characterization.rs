//! Weighted-Lorentz characterization functionals.
//!
//! The line functional takes a profile `γ` on `R`, computes `γ̂` by FFT and
//! evaluates `‖γ̂ (1+|·|)^{-(d-1)/2}‖` in `L^{p,ν}(R, (1+|s|)^{d-1} ds)` on
//! `|s| <= R`. The radial functional evaluates `‖F_d^{-1}[γ(|·|)]‖_{L^{p,ν}(R^d)}`
//! in polar coordinates. The global functional scans dilations `φ·m_0(t·)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lorentz::{lorentz_quasinorm, weighted_grid_samples, LorentzParams};
use crate::profile::Profile1d;
use crate::radial_fourier::{fourier_1d_real, radial_transform_fn, RadialTransformOptions, Spectrum1d};
use crate::special::sphere_area;
use crate::Complex64;

/// Minimum growth factor per doubling of `R` counted as divergence.
pub const GROWTH_PER_DOUBLING: f64 = 1.1;
/// Number of consecutive doublings that must all grow.
pub const TREND_DOUBLINGS: usize = 3;

/// True when each of the last [`TREND_DOUBLINGS`] ratios of a sequence
/// indexed by successive doublings is at least [`GROWTH_PER_DOUBLING`].
pub fn divergent_trend(values: &[f64]) -> bool {
    if values.len() < TREND_DOUBLINGS + 1 {
        return false;
    }
    values[values.len() - TREND_DOUBLINGS - 1..]
        .windows(2)
        .all(|w| w[0] > 0.0 && w[1] >= GROWTH_PER_DOUBLING * w[0])
}

/// FFT box and frequency truncation for line functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    /// Half width `L` of the sampling box `[-L, L)`.
    pub half_width: f64,
    /// FFT length (power of two).
    pub n: usize,
    /// Frequency truncation `R`.
    pub truncation: f64,
}

impl Default for LineSpec {
    fn default() -> Self {
        Self { half_width: 4.0, n: 1 << 16, truncation: 1000.0 }
    }
}

impl LineSpec {
    fn check(&self, max_truncation: f64) -> Result<()> {
        let nyquist = std::f64::consts::PI * self.n as f64 / (2.0 * self.half_width);
        if max_truncation > nyquist {
            return domain(format!(
                "truncation {max_truncation} exceeds the Nyquist frequency {nyquist:.1} of the FFT grid"
            ));
        }
        Ok(())
    }
}

/// `L^{p,ν}((1+|s|)^{d-1} ds)` quasi-norm of `|v| (1+|s|)^{-(d-1)/2}` over
/// spectrum points with `lo < |s| <= hi`.
pub fn weighted_spectrum_norm(
    spectrum: &Spectrum1d,
    dim: usize,
    params: LorentzParams,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let half = 0.5 * (dim as f64 - 1.0);
    let mut centers = Vec::new();
    let mut values = Vec::new();
    for (s, v) in spectrum.freqs.iter().zip(&spectrum.values) {
        let a = s.abs();
        if a > lo && a <= hi || (lo < 0.0 && a <= hi) {
            centers.push(*s);
            values.push(v.norm() / (1.0 + a).powf(half));
        }
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    let samples = weighted_grid_samples(&centers, &values, spectrum.spacing, dim as f64 - 1.0)?;
    lorentz_quasinorm(&samples, params)
}

/// The line functional at one truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvQuantity {
    pub truncation: f64,
    /// Quasi-norm over `|s| <= R`.
    pub value: f64,
    /// Quasi-norm over `|s| <= R/2`.
    pub value_half: f64,
    /// Quasi-norm over the top block `R/2 < |s| <= R`.
    pub top_block: f64,
}

fn spectrum_of(gamma: &Profile1d, spec: &LineSpec) -> Result<Spectrum1d> {
    let (lo, hi) = gamma.support();
    if lo < -spec.half_width || hi > spec.half_width {
        return domain(format!(
            "profile support {:?} does not fit the FFT box of half width {}",
            gamma.support(),
            spec.half_width
        ));
    }
    fourier_1d_real(|x| gamma.eval(x), spec.half_width, spec.n)
}

/// The line functional of `γ` at every truncation in `truncations` (one FFT).
pub fn condition_iv_sequence(
    gamma: &Profile1d,
    dim: usize,
    params: LorentzParams,
    spec: &LineSpec,
    truncations: &[f64],
) -> Result<Vec<IvQuantity>> {
    let top = truncations.iter().copied().fold(0.0, f64::max);
    spec.check(top)?;
    if dim < 1 {
        return domain("dimension must be positive");
    }
    let spectrum = spectrum_of(gamma, spec)?;
    truncations
        .iter()
        .map(|&r| {
            Ok(IvQuantity {
                truncation: r,
                value: weighted_spectrum_norm(&spectrum, dim, params, -1.0, r)?,
                value_half: weighted_spectrum_norm(&spectrum, dim, params, -1.0, 0.5 * r)?,
                top_block: weighted_spectrum_norm(&spectrum, dim, params, 0.5 * r, r)?,
            })
        })
        .collect()
}

/// The line functional of `γ` at truncation `spec.truncation`.
pub fn condition_iv_quantity(
    gamma: &Profile1d,
    dim: usize,
    params: LorentzParams,
    spec: &LineSpec,
) -> Result<IvQuantity> {
    Ok(condition_iv_sequence(gamma, dim, params, spec, &[spec.truncation])?[0])
}

/// Midpoint radial grid `x_i = (i + 1/2) r_max / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGridSpec {
    pub r_max: f64,
    pub n: usize,
}

impl Default for RadialGridSpec {
    fn default() -> Self {
        Self { r_max: 200.0, n: 6400 }
    }
}

/// `‖F_d^{-1}[γ(|·|)]‖_{L^{p,ν}(R^d)}` with cells `|S^{d-1}| x^{d-1} Δx`.
pub fn condition_v_quantity(
    gamma: &Profile1d,
    dim: usize,
    params: LorentzParams,
    grid: &RadialGridSpec,
) -> Result<f64> {
    if dim < 2 {
        return domain(format!("radial functionals need d >= 2, got {dim}"));
    }
    if !(grid.r_max > 0.0 && grid.n >= 2) {
        return domain("radial grid needs r_max > 0 and at least two cells");
    }
    let (lo, hi) = gamma.support();
    let lo = lo.max(0.0);
    if hi <= lo {
        return Ok(0.0);
    }
    let h = grid.r_max / grid.n as f64;
    let xs: Vec<f64> = (0..grid.n).map(|i| (i as f64 + 0.5) * h).collect();
    let out = radial_transform_fn(
        |r| Complex64::new(gamma.eval(r), 0.0),
        (lo, hi),
        gamma.kinks(),
        dim,
        &xs,
        RadialTransformOptions::inverse(),
    )?
    .require_reliable()?;
    let area = sphere_area(dim);
    let values: Vec<f64> = out.values().iter().map(|v| v.norm()).collect();
    let weights: Vec<f64> = xs.iter().map(|x| area * x.powi(dim as i32 - 1) * h).collect();
    let samples = crate::lorentz::WeightedSampleSet::new(values, weights)?;
    lorentz_quasinorm(&samples, params)
}

/// `2^{j/64}` for `j = -384..=384`.
pub fn default_t_grid() -> Vec<f64> {
    dyadic_t_grid(-6, 6, 64)
}

/// `2^{j/per_octave}` covering `[2^lo, 2^hi]`.
pub fn dyadic_t_grid(lo: i32, hi: i32, per_octave: usize) -> Vec<f64> {
    let p = per_octave as i32;
    (lo * p..=hi * p).map(|j| 2f64.powf(j as f64 / p as f64)).collect()
}

/// Per-`t` values of the global functional and their supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M0Report {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub sup: f64,
    pub arg_sup: f64,
    /// Nyquist-limited truncation actually used.
    pub truncation: f64,
}

/// `sup_t ‖κ_t (1+|·|)^{-(d-1)/2}‖`, `κ_t = F[φ · m_0(t·)]`, over `t_grid`.
///
/// A finite scan gives a lower bound of the supremum over all `t > 0`.
pub fn m0_characterization(
    m0: &Profile1d,
    dim: usize,
    params: LorentzParams,
    t_grid: &[f64],
    phi: &Profile1d,
    spec: &LineSpec,
) -> Result<M0Report> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return domain("t-grid must be a nonempty set of positive reals");
    }
    spec.check(spec.truncation)?;
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let window = Profile1d::new("phi*m0(t.)", phi.support(), {
            let (phi, m0) = (phi.clone(), m0.clone());
            move |s| phi.eval(s) * m0.eval(t * s)
        });
        let spectrum = spectrum_of(&window, spec)?;
        values.push(weighted_spectrum_norm(&spectrum, dim, params, -1.0, spec.truncation)?);
    }
    let (mut sup, mut arg_sup) = (values[0], t_grid[0]);
    for (&t, &v) in t_grid.iter().zip(&values) {
        if v > sup {
            sup = v;
            arg_sup = t;
        }
    }
    Ok(M0Report { t: t_grid.to_vec(), values, sup, arg_sup, truncation: spec.truncation })
}

/// Ratio of the global functional of `m_0` to that of `m_0(t₀·)` over `t_grid`.
pub fn dilation_invariance_check(
    m0: &Profile1d,
    dim: usize,
    params: LorentzParams,
    t0: f64,
    t_grid: &[f64],
    phi: &Profile1d,
    spec: &LineSpec,
) -> Result<f64> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return domain(format!("dilation factor must be positive, got {t0}"));
    }
    let dilated = Profile1d::new(format!("{}({t0}.)", m0.label()), (0.0, f64::INFINITY), {
        let m0 = m0.clone();
        move |r| m0.eval(t0 * r)
    });
    let a = m0_characterization(m0, dim, params, t_grid, phi, spec)?;
    let b = m0_characterization(&dilated, dim, params, t_grid, phi, spec)?;
    if b.sup == 0.0 {
        return if a.sup == 0.0 { Ok(1.0) } else { Err(Error::Domain("dilated functional vanished".into())) };
    }
    Ok(a.sup / b.sup)
}

/// One entry of a per-index table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedValue {
    pub index: i32,
    pub value: f64,
    /// Divergent trend of the top-block values across nested truncations.
    pub divergent: bool,
    /// Values at the nested truncations, smallest first.
    pub nested: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityTable {
    pub entries: Vec<IndexedValue>,
    pub sup: f64,
    /// Set when some entry shows a divergent trend (the true value is `+∞`).
    pub sup_divergent: bool,
}

impl QuantityTable {
    pub fn from_entries(entries: Vec<IndexedValue>) -> Self {
        let sup = entries.iter().map(|e| e.value).fold(0.0, f64::max);
        let sup_divergent = entries.iter().any(|e| e.divergent);
        Self { entries, sup, sup_divergent }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub dim: usize,
    pub p: f64,
    /// `null` encodes `ν = ∞`.
    pub nu: Option<f64>,
    pub line: LineSpec,
    pub radial: RadialGridSpec,
    /// Truncations used for the nested diagnostics.
    pub truncations: Vec<f64>,
    pub quantity_iv: QuantityTable,
    pub quantity_v: QuantityTable,
    pub ratio_v_over_iv: Vec<Option<f64>>,
    pub m0: Option<M0Report>,
}

/// `R/8, R/4, R/2, R`.
pub fn nested_truncations(r: f64) -> Vec<f64> {
    vec![r / 8.0, r / 4.0, r / 2.0, r]
}

/// Both per-index functionals for `profiles[i] = γ_{k_min + i}` plus an
/// optional global functional.
pub fn characterize(
    k_min: i32,
    profiles: &[Profile1d],
    m0: Option<(&Profile1d, &[f64], &Profile1d)>,
    dim: usize,
    params: LorentzParams,
    line: &LineSpec,
    radial: &RadialGridSpec,
) -> Result<CharacterizationReport> {
    let truncations = nested_truncations(line.truncation);
    let mut iv = Vec::new();
    let mut v = Vec::new();
    let mut ratios = Vec::new();
    for (i, g) in profiles.iter().enumerate() {
        let index = k_min + i as i32;
        let seq = condition_iv_sequence(g, dim, params, line, &truncations)?;
        let blocks: Vec<f64> = seq.iter().map(|q| q.top_block).collect();
        let a = seq.last().map(|q| q.value).unwrap_or(0.0);
        iv.push(IndexedValue {
            index,
            value: a,
            divergent: divergent_trend(&blocks),
            nested: seq.iter().map(|q| q.value).collect(),
        });
        let b = condition_v_quantity(g, dim, params, radial)?;
        let half = RadialGridSpec { r_max: 0.5 * radial.r_max, n: radial.n / 2 };
        let b_half = condition_v_quantity(g, dim, params, &half)?;
        v.push(IndexedValue { index, value: b, divergent: false, nested: vec![b_half, b] });
        ratios.push(if a > 0.0 { Some(b / a) } else { None });
    }
    let m0 = match m0 {
        Some((m, t_grid, phi)) => Some(m0_characterization(m, dim, params, t_grid, phi, line)?),
        None => None,
    };
    Ok(CharacterizationReport {
        dim,
        p: params.p(),
        nu: if params.is_weak() { None } else { Some(params.nu()) },
        line: *line,
        radial: *radial,
        truncations,
        quantity_iv: QuantityTable::from_entries(iv),
        quantity_v: QuantityTable::from_entries(v),
        ratio_v_over_iv: ratios,
        m0,
    })
}
