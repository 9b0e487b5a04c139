//! Cone and radial multiplier fields and the convolution operators they define.
//!
//! A cone field lives on a grid over `(ξ, τ) ∈ R^d × R` whose last axis is
//! `τ`. Values are symbol samples at the DFT frequencies (see [`crate::grid`]).

use serde::{Deserialize, Serialize};

use crate::bumps::{chi, chi1};
use crate::error::{domain, Error, Result};
use crate::grid::{Axis, GridField, Representation};
use crate::profile::Profile1d;
use crate::Complex64;

/// Relative `L¹` mass allowed in the outer half of the box before a
/// wrap-around warning is logged.
pub const DEFAULT_WRAP_THRESHOLD: f64 = 1e-6;

/// The slab index `k` with `τ ∈ [2^k, 2^{k+1})`, or `None` for `τ <= 0`.
pub fn dyadic_slab(tau: f64) -> Option<i32> {
    if !(tau > 0.0 && tau.is_finite()) {
        return None;
    }
    let mut k = tau.log2().floor() as i32;
    while 2f64.powi(k) > tau {
        k -= 1;
    }
    while 2f64.powi(k + 1) <= tau {
        k += 1;
    }
    Some(k)
}

fn norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Profiles `γ_k`, `k_min <= k <= k_max`, each vanishing off `(-r, r)`.
#[derive(Debug, Clone)]
pub struct GammaFamily {
    k_min: i32,
    profiles: Vec<Profile1d>,
    support_radius: f64,
}

impl GammaFamily {
    pub const DEFAULT_SUPPORT_RADIUS: f64 = 0.25;

    pub fn new(k_min: i32, profiles: Vec<Profile1d>) -> Result<Self> {
        Self::with_support_radius(k_min, profiles, Self::DEFAULT_SUPPORT_RADIUS)
    }

    pub fn with_support_radius(k_min: i32, profiles: Vec<Profile1d>, support_radius: f64) -> Result<Self> {
        if profiles.is_empty() {
            return domain("a gamma family needs at least one profile");
        }
        let r = support_radius;
        for (i, g) in profiles.iter().enumerate() {
            let (lo, hi) = g.support();
            let k = k_min + i as i32;
            if lo < -r || hi > r {
                return domain(format!("gamma_{k} has support {:?}, outside (-{r}, {r})", g.support()));
            }
            // the open interval excludes the endpoints
            if g.eval(-r) != 0.0 || g.eval(r) != 0.0 {
                return domain(format!("gamma_{k} does not vanish at ±{r}"));
            }
        }
        Ok(Self { k_min, profiles, support_radius })
    }

    /// The same profile for every `k` in `k_min..=k_max`.
    pub fn uniform(k_min: i32, k_max: i32, profile: Profile1d) -> Result<Self> {
        if k_max < k_min {
            return domain(format!("empty k-range {k_min}..={k_max}"));
        }
        Self::new(k_min, vec![profile; (k_max - k_min + 1) as usize])
    }

    pub fn k_range(&self) -> (i32, i32) {
        (self.k_min, self.k_min + self.profiles.len() as i32 - 1)
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn get(&self, k: i32) -> Option<&Profile1d> {
        let i = k.checked_sub(self.k_min)?;
        usize::try_from(i).ok().and_then(|i| self.profiles.get(i))
    }

    pub fn labels(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.label().to_string()).collect()
    }

    /// `m_γ(ξ, τ)` at one point, given `|ξ|`.
    pub fn mgamma_value(&self, xi_norm: f64, tau: f64) -> f64 {
        match dyadic_slab(tau).and_then(|k| self.get(k).map(|g| (k, g))) {
            Some((k, g)) => g.eval((xi_norm - tau) / 2f64.powi(k)),
            None => 0.0,
        }
    }
}

/// Profiles `Γ_k` with slopes `b_k`, `|b_k| <= 2`.
#[derive(Debug, Clone)]
pub struct ModulatedFamily {
    k_min: i32,
    profiles: Vec<Profile1d>,
    slopes: Vec<f64>,
}

impl ModulatedFamily {
    pub fn new(k_min: i32, profiles: Vec<Profile1d>, slopes: Vec<f64>) -> Result<Self> {
        if profiles.is_empty() || profiles.len() != slopes.len() {
            return domain("modulated family needs matching, nonempty profile and slope lists");
        }
        if let Some(b) = slopes.iter().find(|b| !(b.abs() <= 2.0)) {
            return domain(format!("slope {b} exceeds 2 in absolute value"));
        }
        Ok(Self { k_min, profiles, slopes })
    }

    pub fn k_range(&self) -> (i32, i32) {
        (self.k_min, self.k_min + self.profiles.len() as i32 - 1)
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// `Σ_k χ₁(2^{-k}|ξ|) χ(2^{-k}τ) Γ_k((|ξ| - b_k τ)/2^k)` at one point.
    pub fn value(&self, xi_norm: f64, tau: f64) -> f64 {
        let mut s = 0.0;
        for (i, (g, &b)) in self.profiles.iter().zip(&self.slopes).enumerate() {
            let scale = 2f64.powi(self.k_min + i as i32);
            let c = chi1(xi_norm / scale);
            if c == 0.0 {
                continue;
            }
            let c = c * chi(tau / scale);
            if c == 0.0 {
                continue;
            }
            s += c * g.eval((xi_norm - b * tau) / scale);
        }
        s
    }
}

/// Which construction produced a cone field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum Provenance {
    Mgamma { k_min: i32, k_max: i32, profiles: Vec<String> },
    Modulated { k_min: i32, k_max: i32, slopes: Vec<f64>, profiles: Vec<String> },
    BochnerRiesz { lambda: f64 },
    Custom { label: String },
}

/// A multiplier on `R^{d+1}` sampled at grid frequencies, last axis `τ`.
#[derive(Debug, Clone)]
pub struct ConeMultiplierField {
    pub field: GridField,
    pub provenance: Provenance,
}

fn cone_field<F>(axes: Vec<Axis>, provenance: Provenance, m: F) -> Result<ConeMultiplierField>
where
    F: Fn(f64, f64) -> f64,
{
    if axes.len() < 2 {
        return domain("cone fields need at least one ξ axis and the τ axis");
    }
    let d = axes.len() - 1;
    let field = GridField::symbol(axes, |k| Complex64::new(m(norm(&k[..d]), k[d]), 0.0))?;
    Ok(ConeMultiplierField { field, provenance })
}

/// `m_γ(ξ,τ) = Σ_k γ_k((|ξ|-τ)/2^k) 1_{[2^k, 2^{k+1})}(τ)` on the grid.
///
/// Slabs outside the family's k-range contribute nothing.
pub fn build_mgamma(family: &GammaFamily, axes: Vec<Axis>) -> Result<ConeMultiplierField> {
    let (k_min, k_max) = family.k_range();
    let provenance = Provenance::Mgamma { k_min, k_max, profiles: family.labels() };
    cone_field(axes, provenance, |xi, tau| family.mgamma_value(xi, tau))
}

pub fn build_modulated(family: &ModulatedFamily, axes: Vec<Axis>) -> Result<ConeMultiplierField> {
    let (k_min, k_max) = family.k_range();
    let provenance = Provenance::Modulated {
        k_min,
        k_max,
        slopes: family.slopes.clone(),
        profiles: family.profiles.iter().map(|p| p.label().to_string()).collect(),
    };
    cone_field(axes, provenance, |xi, tau| family.value(xi, tau))
}

/// `ρ_λ(ξ,τ) = (1 - |ξ|²/τ²)_+^λ` for `τ > 0`, zero for `τ <= 0`.
pub fn br_cone_value(lambda: f64, xi_norm: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let q = 1.0 - (xi_norm / tau).powi(2);
    if q <= 0.0 {
        0.0
    } else {
        q.powf(lambda)
    }
}

pub fn build_br_cone(lambda: f64, axes: Vec<Axis>) -> Result<ConeMultiplierField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("Bochner–Riesz exponent must be positive, got {lambda}"));
    }
    cone_field(axes, Provenance::BochnerRiesz { lambda }, |xi, tau| br_cone_value(lambda, xi, tau))
}

fn check_wrap(f: &GridField) {
    let frac = f.boundary_mass_fraction(0.5);
    if frac > DEFAULT_WRAP_THRESHOLD {
        log::debug!("input carries {frac:.2e} of its mass in the outer half of the box; wrap-around may matter");
    }
}

/// `F^{-1}[m · F f]` with periodic semantics.
pub fn apply_multiplier(f: &GridField, m: &GridField) -> Result<GridField> {
    if f.representation() != Representation::Space {
        return domain("operand must be in the space representation");
    }
    if m.representation() != Representation::Frequency {
        return domain("multiplier must hold frequency samples");
    }
    if !f.same_grid(m) {
        return Err(Error::GridMismatch(format!(
            "operand axes {:?} differ from multiplier axes {:?}",
            f.axes(),
            m.axes()
        )));
    }
    check_wrap(f);
    let mut hat = f.to_frequency()?;
    for (v, s) in hat.values_mut().iter_mut().zip(m.values()) {
        *v *= s;
    }
    hat.to_space()
}

pub fn apply_cone(f: &GridField, m: &ConeMultiplierField) -> Result<GridField> {
    apply_multiplier(f, &m.field)
}

/// Applies the multiplier `ξ ↦ m(ξ)` sampled on `f`'s grid.
pub fn apply_symbol<M>(f: &GridField, m: M) -> Result<GridField>
where
    M: Fn(&[f64]) -> Complex64,
{
    let sym = GridField::symbol(f.axes().to_vec(), m)?;
    apply_multiplier(f, &sym)
}

/// Applies the radial multiplier `m_0(|ξ|)`.
pub fn apply_radial<M>(f: &GridField, m0: M) -> Result<GridField>
where
    M: Fn(f64) -> Complex64,
{
    apply_symbol(f, |k| m0(norm(k)))
}

fn ttau_symbol(family: &GammaFamily, tau: f64) -> Result<(i32, Profile1d)> {
    let k = dyadic_slab(tau).ok_or_else(|| Error::Domain(format!("τ must be positive, got {tau}")))?;
    match family.get(k) {
        Some(g) => Ok((k, g.clone())),
        None => domain(format!("τ = {tau} lies in slab {k}, outside the family range {:?}", family.k_range())),
    }
}

/// `T^τ f` with multiplier `γ_k((|ξ|-τ)/2^k)` for the slab `k` containing `τ`.
pub fn apply_ttau(f: &GridField, tau: f64, family: &GammaFamily) -> Result<GridField> {
    let (k, g) = ttau_symbol(family, tau)?;
    let scale = 2f64.powi(k);
    apply_radial(f, |r| Complex64::new(g.eval((r - tau) / scale), 0.0))
}

/// One summand `α_k T^{τ_k}` of a modulated sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabTerm {
    pub k: i32,
    pub tau: f64,
    pub alpha: Complex64,
}

/// `Σ_k α_k T^{τ_k} f`, each `τ_k` in its slab `[2^k, 2^{k+1})`.
pub fn apply_modulated_sum(f: &GridField, terms: &[SlabTerm], family: &GammaFamily) -> Result<GridField> {
    let mut sym = GridField::zeros(f.axes().to_vec(), Representation::Frequency)?;
    let mut parts = Vec::with_capacity(terms.len());
    for t in terms {
        if dyadic_slab(t.tau) != Some(t.k) {
            return domain(format!("τ = {} is not in slab [2^{}, 2^{})", t.tau, t.k, t.k + 1));
        }
        let (_, g) = ttau_symbol(family, t.tau)?;
        parts.push((g, 2f64.powi(t.k), t.tau, t.alpha));
    }
    let mut k = vec![0.0; f.ndim()];
    for i in 0..sym.len() {
        sym.freqs_into(i, &mut k);
        let r = norm(&k);
        let v: Complex64 = parts.iter().map(|(g, s, tau, a)| a * g.eval((r - tau) / s)).sum();
        sym.values_mut()[i] = v;
    }
    apply_multiplier(f, &sym)
}
