//! TOML run configuration. Every key has a default; see `docs/config.md`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::specs::{MultiplierSpec, ProfileSpec};

/// A problem with the configuration or the command line, reported with exit
/// code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn bad<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub lorentz_norm: LorentzNormConfig,
    pub characterize: CharacterizeConfig,
    pub br_scan: BrScanConfig,
    pub wave_check: WaveCheckConfig,
    pub sph_probe: SphProbeConfig,
    pub opnorm: OpnormConfig,
    pub apply: ApplyConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: 1,
            lorentz_norm: Default::default(),
            characterize: Default::default(),
            br_scan: Default::default(),
            wave_check: Default::default(),
            sph_probe: Default::default(),
            opnorm: Default::default(),
            apply: Default::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzNormConfig {
    /// CSV with columns `value,weight`.
    pub input: PathBuf,
    pub p: f64,
    pub nu: f64,
}

impl Default for LorentzNormConfig {
    fn default() -> Self {
        Self { input: PathBuf::from("samples.csv"), p: 2.0, nu: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineConfig {
    pub half_width: f64,
    pub n: usize,
    pub truncation: f64,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self { half_width: 4.0, n: 1 << 16, truncation: 1000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialConfig {
    pub r_max: f64,
    pub n: usize,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self { r_max: 200.0, n: 6400 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DyadicGrid {
    /// The grid is `2^{j/per_octave}` for `2^lo <= t <= 2^hi`.
    pub lo: i32,
    pub hi: i32,
    pub per_octave: usize,
}

impl Default for DyadicGrid {
    fn default() -> Self {
        Self { lo: -3, hi: 3, per_octave: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacterizeConfig {
    pub dim: usize,
    pub p: f64,
    pub nu: f64,
    /// Index of the first profile, `profiles[i] = γ_{k_min + i}`.
    pub k_min: i32,
    pub line: LineConfig,
    pub radial: RadialConfig,
    pub profiles: Vec<ProfileSpec>,
    /// Radial symbol for the global functional; omitted when absent.
    pub m0: Option<ProfileSpec>,
    pub t_grid: DyadicGrid,
}

impl Default for CharacterizeConfig {
    fn default() -> Self {
        let mut profiles: Vec<ProfileSpec> =
            [0.1, 0.15, 0.2, 0.25].iter().map(|&width| ProfileSpec::Mollifier { center: 1.0, width }).collect();
        profiles.push(ProfileSpec::Tent { center: 1.0, half_width: 0.1 });
        profiles.push(ProfileSpec::Tent { center: 1.0, half_width: 0.2 });
        profiles.push(ProfileSpec::Plateau { a: 0.75, b: 0.85, c: 1.15, d: 1.25 });
        Self {
            dim: 3,
            p: 1.5,
            nu: 2.0,
            k_min: 0,
            line: LineConfig::default(),
            radial: RadialConfig::default(),
            profiles,
            m0: None,
            t_grid: DyadicGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrScanConfig {
    pub dim: usize,
    pub p: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    pub half_width: f64,
    pub n: usize,
    /// Successive doublings of the frequency truncation.
    pub truncations: Vec<f64>,
}

impl Default for BrScanConfig {
    fn default() -> Self {
        Self {
            dim: 4,
            p: vec![1.05, 8.0 / 7.0],
            lambda_min: 0.5,
            lambda_max: 2.0,
            lambda_step: 0.01,
            half_width: 4.0,
            n: 1 << 19,
            truncations: vec![1000.0, 2000.0, 4000.0, 8000.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveCheckConfig {
    pub dim: usize,
    pub n_min: u32,
    pub n_max: u32,
    pub sign: Sign,
}

impl Default for WaveCheckConfig {
    fn default() -> Self {
        Self { dim: 3, n_min: 3, n_max: 8, sign: Sign::Plus }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphProbeConfig {
    pub dim: usize,
    pub p: f64,
    pub r_max: f64,
    pub n_radii: usize,
    pub beta_width: f64,
    pub out_spacing: f64,
    pub budget: usize,
}

impl Default for SphProbeConfig {
    fn default() -> Self {
        Self { dim: 4, p: 1.15, r_max: 8.0, n_radii: 32, beta_width: 0.125, out_spacing: 1.0 / 48.0, budget: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpnormMode {
    Estimate,
    Equivlor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpnormConfig {
    pub mode: OpnormMode,
    pub dim: usize,
    pub extent: f64,
    pub n: usize,
    pub p: f64,
    pub nu: f64,
    pub multiplier: MultiplierSpec,
    pub families: Vec<String>,
    pub budget: usize,
    /// Geometric dilation grid for `equivlor`; `t_min = t_max = 0` selects the
    /// range resolved by the grid.
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

impl Default for OpnormConfig {
    fn default() -> Self {
        Self {
            mode: OpnormMode::Estimate,
            dim: 2,
            extent: 16.0,
            n: 128,
            p: 1.2,
            nu: 1.2,
            multiplier: MultiplierSpec::BrRadial { lambda: 0.5, radius: 6.0 },
            families: conemult::opnorm::WitnessFamily::ALL.iter().map(|f| f.name().to_string()).collect(),
            budget: 200,
            t_min: 0.0,
            t_max: 0.0,
            t_count: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApplyConfig {
    /// Input field in the binary field format.
    pub input: PathBuf,
    /// Output file name, written inside the output directory.
    pub output: String,
    pub multiplier: MultiplierSpec,
    /// Also write the output as CSV when it has at most this many points.
    pub csv_limit: usize,
}

impl Default for ApplyConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("input.cmgf"),
            output: "output.cmgf".into(),
            multiplier: MultiplierSpec::BrRadial { lambda: 0.5, radius: 6.0 },
            csv_limit: 4096,
        }
    }
}

fn check_lorentz(p: f64, nu: f64) -> ConfigResult<()> {
    if !(p.is_finite() && p > 0.0) {
        return bad(format!("p must be finite and positive, got {p}"));
    }
    if nu.is_nan() || nu < p {
        return bad(format!("nu must satisfy nu >= p (inf for weak type), got p={p}, nu={nu}"));
    }
    Ok(())
}

fn check_pow2(name: &str, n: usize) -> ConfigResult<()> {
    if n < 2 || !n.is_power_of_two() {
        return bad(format!("{name} must be a power of two >= 2, got {n}"));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> ConfigResult<()> {
    if !(x.is_finite() && x > 0.0) {
        return bad(format!("{name} must be finite and positive, got {x}"));
    }
    Ok(())
}

impl LorentzNormConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        check_lorentz(self.p, self.nu)
    }
}

impl CharacterizeConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        check_lorentz(self.p, self.nu)?;
        if self.dim < 2 {
            return bad(format!("characterize.dim must be at least 2, got {}", self.dim));
        }
        check_pow2("characterize.line.n", self.line.n)?;
        check_positive("characterize.line.half_width", self.line.half_width)?;
        check_positive("characterize.line.truncation", self.line.truncation)?;
        check_positive("characterize.radial.r_max", self.radial.r_max)?;
        if self.radial.n < 2 {
            return bad("characterize.radial.n must be at least 2");
        }
        if self.profiles.is_empty() {
            return bad("characterize.profiles is empty");
        }
        for p in &self.profiles {
            p.validate()?;
        }
        if let Some(m) = &self.m0 {
            m.validate()?;
            if self.t_grid.per_octave == 0 || self.t_grid.lo > self.t_grid.hi {
                return bad("characterize.t_grid needs per_octave >= 1 and lo <= hi");
            }
        }
        Ok(())
    }
}

impl BrScanConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        if self.dim < 2 {
            return bad(format!("br_scan.dim must be at least 2, got {}", self.dim));
        }
        if self.p.is_empty() {
            return bad("br_scan.p is empty");
        }
        check_positive("br_scan.lambda_step", self.lambda_step)?;
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite() && self.lambda_min < self.lambda_max) {
            return bad("br_scan needs lambda_min < lambda_max");
        }
        check_pow2("br_scan.n", self.n)?;
        check_positive("br_scan.half_width", self.half_width)?;
        if self.truncations.len() < 4 {
            return bad("br_scan.truncations needs at least four doublings");
        }
        if self.truncations.windows(2).any(|w| !(w[1] > w[0])) || !(self.truncations[0] > 0.0) {
            return bad("br_scan.truncations must be positive and increasing");
        }
        Ok(())
    }
}

impl WaveCheckConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        if !(2..=4).contains(&self.dim) {
            return bad(format!("wave_check.dim must be 2, 3 or 4, got {}", self.dim));
        }
        if !(1 <= self.n_min && self.n_min < self.n_max && self.n_max <= conemult::wave::MAX_WAVE_INDEX) {
            return bad(format!(
                "wave_check needs 1 <= n_min < n_max <= {}, got {}..{}",
                conemult::wave::MAX_WAVE_INDEX,
                self.n_min,
                self.n_max
            ));
        }
        Ok(())
    }
}

impl SphProbeConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        if !(2..=4).contains(&self.dim) {
            return bad(format!("sph_probe.dim must be 2, 3 or 4, got {}", self.dim));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad(format!("sph_probe.p must be at least 1, got {}", self.p));
        }
        if !(self.r_max > 1.0 && self.r_max.is_finite()) {
            return bad("sph_probe.r_max must exceed 1");
        }
        if !(1..=64).contains(&self.n_radii) {
            return bad("sph_probe.n_radii must lie in 1..=64");
        }
        check_positive("sph_probe.beta_width", self.beta_width)?;
        check_positive("sph_probe.out_spacing", self.out_spacing)?;
        if self.budget == 0 {
            return bad("sph_probe.budget must be at least 1");
        }
        Ok(())
    }
}

impl OpnormConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        check_lorentz(self.p, self.nu)?;
        if !(1..=conemult::grid::MAX_AXES).contains(&self.dim) {
            return bad(format!("opnorm.dim must lie in 1..={}", conemult::grid::MAX_AXES));
        }
        check_pow2("opnorm.n", self.n)?;
        check_positive("opnorm.extent", self.extent)?;
        if self.budget == 0 {
            return bad("opnorm.budget must be at least 1");
        }
        if self.families.is_empty() {
            return bad("opnorm.families is empty");
        }
        for f in &self.families {
            conemult::opnorm::WitnessFamily::from_name(f).map_err(|e| ConfigError(e.to_string()))?;
        }
        self.multiplier.validate(self.dim)?;
        if self.mode == OpnormMode::Equivlor {
            if !self.multiplier.is_radial() {
                return bad("opnorm mode equivlor needs a radial multiplier");
            }
            let auto = self.t_min == 0.0 && self.t_max == 0.0;
            if !auto && !(self.t_min > 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
                return bad("opnorm needs 0 < t_min <= t_max, or both zero");
            }
            if self.t_count == 0 {
                return bad("opnorm.t_count must be at least 1");
            }
        }
        Ok(())
    }
}

impl ApplyConfig {
    pub fn validate(&self) -> ConfigResult<()> {
        let name = Path::new(&self.output);
        if self.output.is_empty() || name.components().count() != 1 || name.file_name().is_none() {
            return bad(format!("apply.output must be a plain file name, got {:?}", self.output));
        }
        if !self.output.ends_with(".cmgf") {
            return bad("apply.output must end in .cmgf");
        }
        Ok(())
    }
}

/// Sets `key = value` in `table`, creating intermediate tables for dotted
/// keys. The value is parsed as TOML and kept as a string if that fails.
pub fn apply_override(table: &mut toml::Table, key: &str, raw: &str) -> ConfigResult<()> {
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return bad(format!("malformed override key {key:?}"));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return bad(format!("override {key:?} descends into a non-table value")),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Reads the config file (if any), applies overrides and resolves defaults.
pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> ConfigResult<Config> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>().map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for (k, v) in overrides {
        apply_override(&mut table, k, v)?;
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError(e.to_string()))
}

/// The effective configuration as TOML, suitable for `--config`.
pub fn to_toml(cfg: &Config) -> String {
    toml::to_string(cfg).expect("config serializes")
}
