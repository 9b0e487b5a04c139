//! Named profiles and multipliers that configs can refer to.

use conemult::bochner_riesz::br_gamma;
use conemult::bumps::{mollifier, plateau};
use conemult::grid::{Axis, GridField};
use conemult::multiplier::{build_br_cone, build_mgamma, GammaFamily};
use conemult::profile::Profile1d;
use conemult::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, ConfigResult};

fn positive(name: &str, x: f64) -> ConfigResult<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ConfigError(format!("{name} must be finite and positive, got {x}")))
    }
}

/// A real profile on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `exp(-1/(1-u²))` with `u = (s - center)/width`.
    Mollifier { center: f64, width: f64 },
    /// `max(0, 1 - |s - center|/half_width)`.
    Tent { center: f64, half_width: f64 },
    /// Smooth plateau: rises on `[a, b]`, equals 1 on `[b, c]`, falls on `[c, d]`.
    Plateau { a: f64, b: f64, c: f64, d: f64 },
    /// `(-u)^λ` near `0⁻` times a smooth cutoff, the Bochner–Riesz slab profile.
    BochnerRiesz { lambda: f64 },
    /// `(1 - (r/radius)²)_+^λ` for `r >= 0`.
    BrRadial { lambda: f64, radius: f64 },
    /// Indicator of `[0, radius]`.
    Ball { radius: f64 },
    /// `value` on `[0, ∞)`.
    Constant { value: f64 },
}

impl ProfileSpec {
    pub fn validate(&self) -> ConfigResult<()> {
        match *self {
            ProfileSpec::Mollifier { center, width } => {
                positive("mollifier width", width)?;
                if !center.is_finite() {
                    return Err(ConfigError("mollifier center must be finite".into()));
                }
            }
            ProfileSpec::Tent { center, half_width } => {
                positive("tent half_width", half_width)?;
                if !center.is_finite() {
                    return Err(ConfigError("tent center must be finite".into()));
                }
            }
            ProfileSpec::Plateau { a, b, c, d } => {
                if !(a < b && b <= c && c < d && a.is_finite() && d.is_finite()) {
                    return Err(ConfigError(format!("plateau needs a < b <= c < d, got {a}, {b}, {c}, {d}")));
                }
            }
            ProfileSpec::BochnerRiesz { lambda } => positive("lambda", lambda)?,
            ProfileSpec::BrRadial { lambda, radius } => {
                positive("lambda", lambda)?;
                positive("radius", radius)?;
            }
            ProfileSpec::Ball { radius } => positive("radius", radius)?,
            ProfileSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(ConfigError("constant value must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> conemult::Result<Profile1d> {
        Ok(match *self {
            ProfileSpec::Mollifier { center, width } => Profile1d::new(
                format!("mollifier(c={center},w={width})"),
                (center - width, center + width),
                move |s| mollifier((s - center) / width),
            ),
            ProfileSpec::Tent { center, half_width } => Profile1d::tent(half_width).shifted(center),
            ProfileSpec::Plateau { a, b, c, d } => {
                Profile1d::new(format!("plateau({a},{b},{c},{d})"), (a, d), move |s| plateau(s, a, b, c, d))
            }
            ProfileSpec::BochnerRiesz { lambda } => br_gamma(lambda)?,
            ProfileSpec::BrRadial { lambda, radius } => {
                Profile1d::new(format!("br_radial(λ={lambda},R={radius})"), (0.0, radius), move |r| {
                    (1.0 - (r / radius).powi(2)).max(0.0).powf(lambda)
                })
                .with_kinks(vec![radius])
            }
            ProfileSpec::Ball { radius } => {
                Profile1d::new(format!("ball(R={radius})"), (0.0, radius), |_| 1.0).with_kinks(vec![radius])
            }
            ProfileSpec::Constant { value } => Profile1d::new(format!("constant({value})"), (0.0, f64::INFINITY), move |_| value),
        })
    }
}

/// A Fourier multiplier on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultiplierSpec {
    Identity,
    /// `(1 - |ξ|²/radius²)_+^λ`.
    BrRadial { lambda: f64, radius: f64 },
    /// Indicator of `|ξ| < radius`.
    Ball { radius: f64 },
    /// `e^{i·frequency·|ξ|}` times a mollifier in `|ξ|` centred at `center`.
    Oscillatory { frequency: f64, center: f64, width: f64 },
    /// Indicator of `ξ_axis > 0`.
    HalfSpace { axis: usize },
    /// `(1 - |ξ|²/τ²)_+^λ`; the last axis is `τ`.
    BrCone { lambda: f64 },
    /// `m_γ` with tent profiles of the given half width on slabs `k_min..=k_max`; the last axis is `τ`.
    Mgamma { k_min: i32, k_max: i32, half_width: f64 },
}

type Radial = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

impl MultiplierSpec {
    pub fn is_radial(&self) -> bool {
        self.radial().is_some()
    }

    pub fn validate(&self, dim: usize) -> ConfigResult<()> {
        match *self {
            MultiplierSpec::Identity => {}
            MultiplierSpec::BrRadial { lambda, radius } => {
                positive("lambda", lambda)?;
                positive("radius", radius)?;
            }
            MultiplierSpec::Ball { radius } => positive("radius", radius)?,
            MultiplierSpec::Oscillatory { frequency, center, width } => {
                positive("width", width)?;
                if !(frequency.is_finite() && center.is_finite()) {
                    return Err(ConfigError("oscillatory frequency and center must be finite".into()));
                }
            }
            MultiplierSpec::HalfSpace { axis } => {
                if axis >= dim {
                    return Err(ConfigError(format!("half_space axis {axis} out of range for {dim} axes")));
                }
            }
            MultiplierSpec::BrCone { lambda } => {
                positive("lambda", lambda)?;
                if dim < 2 {
                    return Err(ConfigError("cone multipliers need at least two axes".into()));
                }
            }
            MultiplierSpec::Mgamma { k_min, k_max, half_width } => {
                positive("half_width", half_width)?;
                if k_min > k_max {
                    return Err(ConfigError("mgamma needs k_min <= k_max".into()));
                }
                if dim < 2 {
                    return Err(ConfigError("cone multipliers need at least two axes".into()));
                }
            }
        }
        Ok(())
    }

    /// `m_0` for radial multipliers.
    pub fn radial(&self) -> Option<Radial> {
        match *self {
            MultiplierSpec::Identity => Some(Box::new(|_| Complex64::new(1.0, 0.0))),
            MultiplierSpec::BrRadial { lambda, radius } => Some(Box::new(move |r| {
                Complex64::new((1.0 - (r / radius).powi(2)).max(0.0).powf(lambda), 0.0)
            })),
            MultiplierSpec::Ball { radius } => {
                Some(Box::new(move |r| Complex64::new(if r < radius { 1.0 } else { 0.0 }, 0.0)))
            }
            MultiplierSpec::Oscillatory { frequency, center, width } => {
                Some(Box::new(move |r| Complex64::from_polar(mollifier((r - center) / width), frequency * r)))
            }
            _ => None,
        }
    }

    /// The symbol sampled at the DFT frequencies of `axes`.
    pub fn build(&self, axes: &[Axis]) -> conemult::Result<GridField> {
        if let Some(m0) = self.radial() {
            return GridField::symbol(axes.to_vec(), |k| m0(k.iter().map(|x| x * x).sum::<f64>().sqrt()));
        }
        match *self {
            MultiplierSpec::HalfSpace { axis } => {
                GridField::symbol(axes.to_vec(), |k| Complex64::new(if k[axis] > 0.0 { 1.0 } else { 0.0 }, 0.0))
            }
            MultiplierSpec::BrCone { lambda } => Ok(build_br_cone(lambda, axes.to_vec())?.field),
            MultiplierSpec::Mgamma { k_min, k_max, half_width } => {
                let fam = GammaFamily::uniform(k_min, k_max, Profile1d::tent(half_width))?;
                Ok(build_mgamma(&fam, axes.to_vec())?.field)
            }
            _ => unreachable!("radial kinds handled above"),
        }
    }
}
