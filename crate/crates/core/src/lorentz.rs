//! Decreasing rearrangements and Lorentz quasi-norms on weighted discrete measures.
//!
//! A [`WeightedSampleSet`] is a step function: cell `i` has measure `weights[i]`
//! and carries the value `values[i]`. The quasi-norm used throughout is
//!
//! ```text
//! ‖f‖_{p,ν} = ( ∫_0^∞ (t^{1/p} f*(t))^ν dt/t )^{1/ν}      (ν < ∞)
//! ‖f‖_{p,∞} = sup_t t^{1/p} f*(t)
//! ```
//!
//! with no Gamma-factor normalisation. For `p = ν` this is the weighted `L^p` norm.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::Complex64;

/// Exponents `(p, ν)` of a Lorentz space. `nu = f64::INFINITY` is weak `L^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    p: f64,
    nu: f64,
}

impl LorentzParams {
    pub fn new(p: f64, nu: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return domain(format!("Lorentz exponent p must be finite and positive, got {p}"));
        }
        if nu.is_nan() || nu < p {
            return domain(format!("second Lorentz exponent must satisfy nu >= p, got p={p}, nu={nu}"));
        }
        Ok(Self { p, nu })
    }

    /// Strong `L^p`, i.e. `ν = p`.
    pub fn strong(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// Weak `L^p`, i.e. `ν = ∞`.
    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn is_weak(&self) -> bool {
        self.nu.is_infinite()
    }
}

/// Magnitudes `|f|` on cells of positive measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSampleSet {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSampleSet {
    /// Builds a sample set; values are replaced by their absolute values.
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return domain(format!(
                "sample set has {} values but {} weights",
                values.len(),
                weights.len()
            ));
        }
        for (i, (&v, &w)) in values.iter().zip(&weights).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { at: i as f64, value: v });
            }
            if !(w.is_finite() && w > 0.0) {
                return domain(format!("weight {i} must be finite and positive, got {w}"));
            }
        }
        let values = values.into_iter().map(f64::abs).collect();
        Ok(Self { values, weights })
    }

    pub fn from_complex(values: &[Complex64], weights: Vec<f64>) -> Result<Self> {
        Self::new(values.iter().map(|z| z.norm()).collect(), weights)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted `ℓ^p` norm `(Σ w_i |v_i|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let scale = self.values.iter().copied().fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (v / scale).powf(p))
            .sum();
        scale * s.powf(1.0 / p)
    }

    /// Multiplies every value by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c.abs()).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Right-continuous nonincreasing step function `f*` on `[0, t_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedFunction {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
    /// Exact measure of each piece; `breakpoints` are its partial sums.
    lengths: Vec<f64>,
}

impl RearrangedFunction {
    /// `t_0 = 0 < t_1 < … < t_n`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Value of `f*` on `[t_i, t_{i+1})`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn total_measure(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    /// Evaluates `f*(t)`; zero beyond the total measure.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.levels[0];
        }
        // first breakpoint strictly greater than t
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 || idx > self.levels.len() {
            0.0
        } else {
            self.levels[idx - 1]
        }
    }

    /// Measure of `{f* > λ}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        self.levels
            .iter()
            .zip(&self.lengths)
            .filter(|(&l, _)| l > lambda)
            .map(|(_, &len)| len)
            .sum()
    }
}

/// Sorts samples by value (descending) and merges equal values into one level.
pub fn decreasing_rearrangement(samples: &WeightedSampleSet) -> Result<RearrangedFunction> {
    if samples.is_empty() {
        return domain("decreasing rearrangement of an empty sample set");
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples.values[b].total_cmp(&samples.values[a]));

    let mut levels = Vec::new();
    let mut lengths: Vec<f64> = Vec::new();
    for &i in &order {
        let v = samples.values[i];
        let w = samples.weights[i];
        match levels.last() {
            Some(&last) if last == v => *lengths.last_mut().unwrap() += w,
            _ => {
                levels.push(v);
                lengths.push(w);
            }
        }
    }
    let mut breakpoints = Vec::with_capacity(levels.len() + 1);
    breakpoints.push(0.0);
    let mut acc = 0.0;
    for &len in &lengths {
        acc += len;
        breakpoints.push(acc);
    }
    Ok(RearrangedFunction { breakpoints, levels, lengths })
}

/// `b^q - a^q` for `0 <= a < b`, accurate when `b - a` is small relative to `a`.
fn power_increment(a: f64, len: f64, q: f64) -> f64 {
    if a == 0.0 {
        len.powf(q)
    } else {
        a.powf(q) * (q * (len / a).ln_1p()).exp_m1()
    }
}

/// Lorentz quasi-norm of a rearranged function.
pub fn rearranged_quasinorm(f: &RearrangedFunction, params: LorentzParams) -> f64 {
    let scale = f.levels[0];
    if scale == 0.0 {
        return 0.0;
    }
    let p = params.p();
    let nu = params.nu();
    if nu.is_infinite() {
        // right endpoints: sup over [t_i, t_{i+1}) of t^{1/p} f*(t)
        return f
            .levels
            .iter()
            .zip(&f.breakpoints[1..])
            .map(|(&l, &t)| t.powf(1.0 / p) * l)
            .fold(0.0, f64::max);
    }
    let q = nu / p;
    let sum: f64 = f
        .levels
        .iter()
        .zip(&f.lengths)
        .zip(&f.breakpoints)
        .map(|((&l, &len), &t0)| {
            let inc = if q == 1.0 { len } else { power_increment(t0, len, q) };
            (l / scale).powf(nu) * inc
        })
        .sum();
    scale * (sum / q).powf(1.0 / nu)
}

/// `‖f‖_{L^{p,ν}}` of the step function described by `samples`.
pub fn lorentz_quasinorm(samples: &WeightedSampleSet, params: LorentzParams) -> Result<f64> {
    let f = decreasing_rearrangement(samples)?;
    Ok(rearranged_quasinorm(&f, params))
}

/// Samples `|f|` on cells centred at `centers` (uniform width `cell`) with the
/// measure `(1+|s|)^{d-1} ds`.
pub fn weighted_grid_samples(
    centers: &[f64],
    values: &[f64],
    cell: f64,
    weight_exponent: f64,
) -> Result<WeightedSampleSet> {
    let weights = centers
        .iter()
        .map(|s| cell * (1.0 + s.abs()).powf(weight_exponent))
        .collect();
    WeightedSampleSet::new(values.to_vec(), weights)
}

/// Midpoint discretisation of `|f|` on `[-R, R]` with the measure
/// `(1+|s|)^{weight_exponent} ds`, `N` cells.
pub fn weighted_line_samples<F>(
    f: F,
    weight_exponent: f64,
    truncation: f64,
    resolution: usize,
) -> Result<WeightedSampleSet>
where
    F: Fn(f64) -> f64,
{
    if !(truncation.is_finite() && truncation > 0.0) {
        return domain(format!("truncation must be positive, got {truncation}"));
    }
    if resolution < 2 {
        return domain(format!("resolution must be at least 2, got {resolution}"));
    }
    let h = 2.0 * truncation / resolution as f64;
    let mut centers = Vec::with_capacity(resolution);
    let mut values = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let s = -truncation + (i as f64 + 0.5) * h;
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: s, value: v });
        }
        centers.push(s);
        values.push(v);
    }
    weighted_grid_samples(&centers, &values, h, weight_exponent)
}
