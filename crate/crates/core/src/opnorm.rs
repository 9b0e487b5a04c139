//! Lower bounds for `L^p → L^{p,ν}` quasi-norms of grid operators.
//!
//! Every bound is the largest ratio `‖Tf‖_{p,ν} / ‖f‖_p` seen over a
//! deterministic sequence of witnesses, so it is a valid lower bound for the
//! discretised operator by construction. The sequence depends only on the
//! seed and on earlier ratios, never on the budget, which makes the bound
//! nondecreasing in the budget.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::{Axis, GridField};
use crate::lorentz::LorentzParams;
use crate::multiplier::apply_multiplier;
use crate::Complex64;

/// Family name plus the parameters that produced a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub family: String,
    pub params: BTreeMap<String, f64>,
}

impl WitnessRecord {
    pub fn new(family: impl Into<String>) -> Self {
        Self { family: family.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    pub lower_bound: f64,
    pub witness: WitnessRecord,
    pub p: f64,
    /// `None` for `ν = ∞`.
    pub nu: Option<f64>,
    pub budget: usize,
    pub evaluated: usize,
    /// Witnesses dropped for zero norm or a non-finite ratio.
    pub skipped: usize,
    pub seed: u64,
    /// Parameters of the best grid witness, for re-evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_witness: Option<WitnessParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessFamily {
    /// `η(t(x - c)) e^{i⟨ω, x⟩}` with `η = e^{-|x|²/2}`.
    DilatedBump,
    /// Six randomly placed, scaled and phased bumps around `c`.
    RandomSuperposition,
    /// Incoming spherical wave `e^{-i a |x - c|} η(t(x - c)/4)`, `a = |ω| + 2t`.
    RadialFocus,
    /// Anisotropic packet: width `1/t` along the first axis, `1/√t` across.
    AnnulusKnapp,
}

impl WitnessFamily {
    pub const ALL: [WitnessFamily; 4] = [
        WitnessFamily::DilatedBump,
        WitnessFamily::RandomSuperposition,
        WitnessFamily::RadialFocus,
        WitnessFamily::AnnulusKnapp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WitnessFamily::DilatedBump => "dilated_bump",
            WitnessFamily::RandomSuperposition => "random_superposition",
            WitnessFamily::RadialFocus => "radial_focus",
            WitnessFamily::AnnulusKnapp => "annulus_knapp",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .map_or_else(|| domain(format!("unknown witness family {name:?}")), Ok)
    }
}

/// One point of a witness family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub family: WitnessFamily,
    pub t: f64,
    pub center: Vec<f64>,
    pub modulation: Vec<f64>,
    /// Seed offset for the random family.
    pub draw: u64,
}

impl WitnessParams {
    pub fn dilated(t: f64, ndim: usize) -> Self {
        Self { family: WitnessFamily::DilatedBump, t, center: vec![0.0; ndim], modulation: vec![0.0; ndim], draw: 0 }
    }

    pub fn record(&self) -> WitnessRecord {
        let mut r = WitnessRecord::new(self.family.name()).with("t", self.t);
        for (i, c) in self.center.iter().enumerate() {
            r = r.with(format!("center_{i}"), *c);
        }
        for (i, w) in self.modulation.iter().enumerate() {
            r = r.with(format!("modulation_{i}"), *w);
        }
        if self.family == WitnessFamily::RandomSuperposition {
            r = r.with("draw", self.draw as f64);
        }
        r
    }

    /// Samples the witness on a grid.
    pub fn generate(&self, axes: &[Axis], seed: u64) -> Result<GridField> {
        let d = axes.len();
        if self.center.len() != d || self.modulation.len() != d {
            return domain("witness parameters do not match the grid dimension");
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return domain(format!("witness dilation must be positive, got {}", self.t));
        }
        let t = self.t;
        let c = &self.center;
        let w = &self.modulation;
        let phase = |x: &[f64]| x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        match self.family {
            WitnessFamily::DilatedBump => GridField::from_fn(axes.to_vec(), |x| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (t * (a - b)).powi(2)).sum();
                Complex64::from_polar((-0.5 * r2).exp(), phase(x))
            }),
            WitnessFamily::RadialFocus => {
                let a = w.iter().map(|v| v * v).sum::<f64>().sqrt() + 2.0 * t;
                GridField::from_fn(axes.to_vec(), |x| {
                    let r = x.iter().zip(c).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                    Complex64::from_polar((-0.5 * (t * r / 4.0).powi(2)).exp(), -a * r)
                })
            }
            WitnessFamily::AnnulusKnapp => GridField::from_fn(axes.to_vec(), |x| {
                let mut e = (t * (x[0] - c[0])).powi(2);
                for k in 1..d {
                    e += t * (x[k] - c[k]).powi(2);
                }
                Complex64::from_polar((-0.5 * e).exp(), phase(x) + t * x[0])
            }),
            WitnessFamily::RandomSuperposition => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ self.draw.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let terms: Vec<(Vec<f64>, f64, Complex64, Vec<f64>)> = (0..6)
                    .map(|_| {
                        let off: Vec<f64> = (0..d).map(|k| c[k] + rng.gen_range(-2.0..2.0) / t).collect();
                        let s = t * rng.gen_range(0.5..2.0);
                        let amp = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
                        let freq: Vec<f64> = (0..d).map(|k| w[k] + rng.gen_range(-1.0..1.0) * t).collect();
                        (off, s, amp, freq)
                    })
                    .collect();
                GridField::from_fn(axes.to_vec(), |x| {
                    terms
                        .iter()
                        .map(|(o, s, amp, f)| {
                            let r2: f64 = x.iter().zip(o).map(|(a, b)| (s * (a - b)).powi(2)).sum();
                            let ph: f64 = x.iter().zip(f).map(|(a, b)| a * b).sum();
                            amp * Complex64::from_polar((-0.5 * r2).exp(), ph)
                        })
                        .sum()
                })
            }
        }
    }
}

/// `‖Tf‖_{p,ν} / ‖f‖_p`, or `None` when `f` has zero norm or the ratio is
/// not finite.
pub fn witness_ratio<T>(op: &T, f: &GridField, params: LorentzParams) -> Result<Option<f64>>
where
    T: Fn(&GridField) -> Result<GridField> + ?Sized,
{
    let den = f.lp_norm(params.p());
    if !(den > 0.0 && den.is_finite()) {
        return Ok(None);
    }
    let num = op(f)?.lorentz_norm(params)?;
    let r = num / den;
    Ok(r.is_finite().then_some(r))
}

/// Re-evaluates a recorded witness.
pub fn evaluate_witness<T>(op: &T, axes: &[Axis], params: LorentzParams, w: &WitnessParams, seed: u64) -> Result<f64>
where
    T: Fn(&GridField) -> Result<GridField> + ?Sized,
{
    let f = w.generate(axes, seed)?;
    witness_ratio(op, &f, params)?.map_or_else(|| domain("witness has zero norm"), Ok)
}

/// Range of dilations resolved by the grid: bump width between two cells and
/// a sixteenth of the box.
pub fn resolvable_dilations(axes: &[Axis]) -> (f64, f64) {
    let lmin = axes.iter().map(|a| a.extent).fold(f64::INFINITY, f64::min);
    let hmax = axes.iter().map(Axis::cell).fold(0.0, f64::max);
    (16.0 / lmin, 1.0 / (2.0 * hmax))
}

fn initial_witnesses(axes: &[Axis], families: &[WitnessFamily]) -> Vec<WitnessParams> {
    let d = axes.len();
    let (lo, hi) = resolvable_dilations(axes);
    let ts: Vec<f64> = if hi > lo {
        (0..7).map(|i| lo * (hi / lo).powf(i as f64 / 6.0)).collect()
    } else {
        vec![lo.min(hi)]
    };
    let mut out = Vec::new();
    for &fam in families {
        for &t in &ts {
            let mut w = WitnessParams::dilated(t, d);
            w.family = fam;
            out.push(w);
        }
        if fam == WitnessFamily::RandomSuperposition {
            for draw in 1..4 {
                let mut w = WitnessParams::dilated(ts[ts.len() / 2], d);
                w.family = fam;
                w.draw = draw;
                out.push(w);
            }
        }
    }
    out
}

struct Search<'a, T: ?Sized> {
    op: &'a T,
    axes: &'a [Axis],
    params: LorentzParams,
    seed: u64,
    budget: usize,
    evaluated: usize,
    skipped: usize,
    best: Option<(f64, WitnessParams)>,
}

impl<T> Search<'_, T>
where
    T: Fn(&GridField) -> Result<GridField> + ?Sized,
{
    fn exhausted(&self) -> bool {
        self.evaluated >= self.budget
    }

    /// Evaluates `w`; returns whether it improved the best ratio.
    fn try_witness(&mut self, w: WitnessParams) -> Result<bool> {
        self.evaluated += 1;
        let f = w.generate(self.axes, self.seed)?;
        match witness_ratio(self.op, &f, self.params)? {
            None => {
                self.skipped += 1;
                Ok(false)
            }
            Some(r) => {
                if self.best.as_ref().is_none_or(|(b, _)| r > *b) {
                    self.best = Some((r, w));
                    Ok(true)
                } else {
                    Ok(false)
                }
            }
        }
    }
}

/// Coordinate search over dilation, centre and modulation, started from
/// `seeds` followed by a fixed sweep of every family. `budget` counts
/// evaluations; the seeds are always evaluated.
pub fn estimate_lower_seeded<T>(
    op: &T,
    axes: &[Axis],
    params: LorentzParams,
    families: &[WitnessFamily],
    seeds: &[WitnessParams],
    budget: usize,
    seed: u64,
) -> Result<OpNormEstimate>
where
    T: Fn(&GridField) -> Result<GridField> + ?Sized,
{
    if budget == 0 {
        return domain("budget must be at least 1");
    }
    if families.is_empty() {
        return domain("at least one witness family is needed");
    }
    let d = axes.len();
    let mut s = Search {
        op,
        axes,
        params,
        seed,
        budget: budget.max(seeds.len()),
        evaluated: 0,
        skipped: 0,
        best: None,
    };
    for w in seeds {
        s.try_witness(w.clone())?;
    }
    for w in initial_witnesses(axes, families) {
        if s.exhausted() {
            break;
        }
        s.try_witness(w)?;
    }
    let (tlo, thi) = resolvable_dilations(axes);
    let half_box: Vec<f64> = axes.iter().map(|a| 0.25 * a.extent).collect();
    let wmax: Vec<f64> = axes.iter().map(|a| 0.5 * std::f64::consts::PI / a.cell()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut log_step = 0.5;
    let mut shift = 1.0;
    while !s.exhausted() {
        let Some((_, base)) = s.best.clone() else {
            // every witness so far had zero norm: draw fresh ones
            let mut w = WitnessParams::dilated(tlo * (thi / tlo).powf(rng.gen::<f64>()), d);
            w.family = families[rng.gen_range(0..families.len())];
            s.try_witness(w)?;
            continue;
        };
        let mut moves = Vec::new();
        for sgn in [1.0, -1.0] {
            let mut w = base.clone();
            w.t = (base.t * (sgn * log_step as f64).exp2()).clamp(tlo.min(thi), thi.max(tlo));
            moves.push(w);
        }
        for k in 0..d {
            for sgn in [1.0, -1.0] {
                let mut w = base.clone();
                w.center[k] = (w.center[k] + sgn * shift / base.t).clamp(-half_box[k], half_box[k]);
                moves.push(w);
                let mut w = base.clone();
                w.modulation[k] = (w.modulation[k] + sgn * shift * base.t).clamp(-wmax[k], wmax[k]);
                moves.push(w);
            }
        }
        let mut improved = false;
        for w in moves {
            if s.exhausted() {
                break;
            }
            if w == base {
                continue;
            }
            if s.try_witness(w)? {
                improved = true;
                break;
            }
        }
        if !improved {
            log_step *= 0.5;
            shift *= 0.5;
            if log_step < 1e-3 {
                // converged: restart from a random point of a random family
                log_step = 0.5;
                shift = 1.0;
                let mut w = WitnessParams::dilated(tlo * (thi / tlo).powf(rng.gen::<f64>()), d);
                w.family = families[rng.gen_range(0..families.len())];
                w.draw = rng.gen_range(4..1 << 20);
                for k in 0..d {
                    w.center[k] = rng.gen_range(-0.5..0.5) * half_box[k];
                    w.modulation[k] = rng.gen_range(-0.5..0.5) * wmax[k];
                }
                if !s.exhausted() {
                    s.try_witness(w)?;
                }
            }
        }
    }
    let nu = if params.is_weak() { None } else { Some(params.nu()) };
    let (lower_bound, best) = match s.best {
        Some((r, w)) => (r, Some(w)),
        None => (0.0, None),
    };
    Ok(OpNormEstimate {
        lower_bound,
        witness: best.as_ref().map_or_else(|| WitnessRecord::new("none"), WitnessParams::record),
        p: params.p(),
        nu,
        budget: s.budget,
        evaluated: s.evaluated,
        skipped: s.skipped,
        seed,
        grid_witness: best,
    })
}

pub fn estimate_lower<T>(
    op: &T,
    axes: &[Axis],
    params: LorentzParams,
    families: &[WitnessFamily],
    budget: usize,
    seed: u64,
) -> Result<OpNormEstimate>
where
    T: Fn(&GridField) -> Result<GridField> + ?Sized,
{
    estimate_lower_seeded(op, axes, params, families, &[], budget, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivlorPoint {
    pub t: f64,
    /// `‖T η_t‖_{p,ν} / ‖η_t‖_p`.
    pub ratio: f64,
    /// `t^{d/p} ‖T η_t‖_{p,ν}`.
    pub raw: f64,
    /// Under-resolved or wrapping dilations, excluded from the supremum.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivlorReport {
    pub dim: usize,
    pub p: f64,
    pub nu: Option<f64>,
    pub points: Vec<EquivlorPoint>,
    /// Largest unflagged `ratio`.
    pub rhs: f64,
    pub rhs_t: f64,
    /// Largest unflagged `raw`.
    pub rhs_raw: f64,
    /// `‖η‖_p` on the continuum; `rhs_raw ≈ rhs · eta_norm`.
    pub eta_norm: f64,
    pub lhs: OpNormEstimate,
    /// `lhs / rhs`.
    pub ratio: f64,
    /// `rhs <= lhs`, exactly.
    pub containment: bool,
}

/// Wrap mass allowed before a dilation is flagged.
const EQUIVLOR_WRAP: f64 = 1e-6;

/// Compares `sup_t ‖T_m η(t·)‖ / ‖η(t·)‖_p` over `t_grid` with a general
/// lower bound for `‖T_m‖`, `m = m0(|ξ|)`, `η = e^{-|x|²/2}`. The dilated
/// bumps of `t_grid` seed the search, so the containment holds exactly.
pub fn equivlor_experiment<M>(
    m0: M,
    axes: &[Axis],
    params: LorentzParams,
    t_grid: &[f64],
    families: &[WitnessFamily],
    budget: usize,
    seed: u64,
) -> Result<EquivlorReport>
where
    M: Fn(f64) -> Complex64,
{
    if t_grid.is_empty() {
        return domain("t grid is empty");
    }
    let d = axes.len();
    let symbol = GridField::symbol(axes.to_vec(), |k| m0(k.iter().map(|x| x * x).sum::<f64>().sqrt()))?;
    let op = |f: &GridField| apply_multiplier(f, &symbol);
    let p = params.p();
    let (_, thi) = resolvable_dilations(axes);
    let mut points = Vec::with_capacity(t_grid.len());
    let mut seeds = Vec::new();
    for &t in t_grid {
        let w = WitnessParams::dilated(t, d);
        let f = w.generate(axes, seed)?;
        let flagged = !(t > 0.0) || t > thi || f.boundary_mass_fraction(0.1) > EQUIVLOR_WRAP;
        let tf = op(&f)?;
        let num = tf.lorentz_norm(params)?;
        let den = f.lp_norm(p);
        points.push(EquivlorPoint { t, ratio: num / den, raw: t.powf(d as f64 / p) * num, flagged });
        if !flagged {
            seeds.push(w);
        }
    }
    if seeds.is_empty() {
        return domain("every dilation in the t grid is flagged");
    }
    let (rhs, rhs_t, rhs_raw) = points.iter().filter(|q| !q.flagged).fold(
        (f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY),
        |(r, t, raw), q| if q.ratio > r { (q.ratio, q.t, raw.max(q.raw)) } else { (r, t, raw.max(q.raw)) },
    );
    let mut fams = families.to_vec();
    if !fams.contains(&WitnessFamily::DilatedBump) {
        fams.push(WitnessFamily::DilatedBump);
    }
    let lhs = estimate_lower_seeded(&op, axes, params, &fams, &seeds, budget, seed)?;
    let eta_norm = (2.0 * std::f64::consts::PI / p).powf(d as f64 / (2.0 * p));
    Ok(EquivlorReport {
        dim: d,
        p,
        nu: lhs.nu,
        containment: rhs <= lhs.lower_bound,
        ratio: lhs.lower_bound / rhs,
        points,
        rhs,
        rhs_t,
        rhs_raw,
        eta_norm,
        lhs,
    })
}
