use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use conemult::bochner_riesz::{critical_scan, lambda_grid, ScanResult, ScanSpec};
use conemult::bumps::bump_phi_profile;
use conemult::characterization::{characterize, dyadic_t_grid, LineSpec, RadialGridSpec};
use conemult::field_io::{read_field, write_field};
use conemult::grid::{cube, Axis, GridField, Representation};
use conemult::lorentz::{decreasing_rearrangement, lorentz_quasinorm, LorentzParams, WeightedSampleSet};
use conemult::multiplier::apply_multiplier;
use conemult::opnorm::{equivlor_experiment, estimate_lower, resolvable_dilations, OpNormEstimate, WitnessFamily};
use conemult::wave::{decompose, default_theta, sph_opnorm_lower, SphSpec, WaveCheck, WaveSign};
use serde::Serialize;

use crate::config::{Config, ConfigError, OpnormMode, Sign};
use crate::output::{finite_or_none, num, OutputDir};
use crate::specs::MultiplierSpec;

pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub out: &'a OutputDir,
    pub threads: usize,
}

/// Maps `f` over `items` on up to `threads` scoped workers; results keep the
/// input order.
pub fn par_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let mut tagged: Vec<(usize, R)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || (w..items.len()).step_by(workers).map(|i| (i, f(&items[i]))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    tagged.sort_by_key(|(i, _)| *i);
    tagged.into_iter().map(|(_, r)| r).collect()
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(format!("{}: {e}", path.display())).into()
}

#[derive(Serialize)]
struct LorentzNormSummary {
    p: f64,
    nu: Option<f64>,
    n_samples: usize,
    total_measure: f64,
    quasinorm: f64,
}

fn read_samples(path: &Path) -> Result<WeightedSampleSet> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| input_error(path, e))?;
    let headers = rdr.headers().map_err(|e| input_error(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| input_error(path, format!("missing column {name:?}")))
    };
    let (vi, wi) = (col("value")?, col("weight")?);
    let (mut values, mut weights) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| input_error(path, e))?;
        let field = |i: usize| -> Result<f64> {
            let raw = rec.get(i).unwrap_or("").trim();
            raw.parse().map_err(|_| input_error(path, format!("row {}: cannot parse {raw:?}", line + 2)))
        };
        values.push(field(vi)?);
        weights.push(field(wi)?);
    }
    WeightedSampleSet::new(values, weights).map_err(|e| input_error(path, e))
}

pub fn lorentz_norm(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.lorentz_norm;
    let samples = read_samples(&c.input)?;
    let params = LorentzParams::new(c.p, c.nu)?;
    let q = lorentz_quasinorm(&samples, params)?;
    let f = decreasing_rearrangement(&samples)?;
    let t = f.breakpoints();
    ctx.out.write_csv(
        "rearrangement.csv",
        &["t_start", "t_end", "level"],
        f.levels().iter().enumerate().map(|(i, l)| vec![num(t[i]), num(t[i + 1]), num(*l)]),
    )?;
    let summary = LorentzNormSummary {
        p: c.p,
        nu: finite_or_none(c.nu),
        n_samples: samples.len(),
        total_measure: samples.total_measure(),
        quasinorm: q,
    };
    ctx.out.write_summary("lorentz-norm", ctx.cfg.seed, &summary)?;
    println!("{q}");
    Ok(())
}

pub fn characterize_cmd(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.characterize;
    let params = LorentzParams::new(c.p, c.nu)?;
    let profiles = c.profiles.iter().map(|p| p.build()).collect::<conemult::Result<Vec<_>>>()?;
    let line = LineSpec { half_width: c.line.half_width, n: c.line.n, truncation: c.line.truncation };
    let radial = RadialGridSpec { r_max: c.radial.r_max, n: c.radial.n };
    let m0 = c.m0.as_ref().map(|m| m.build()).transpose()?;
    let t_grid = dyadic_t_grid(c.t_grid.lo, c.t_grid.hi, c.t_grid.per_octave);
    let phi = bump_phi_profile();
    let rep = characterize(c.k_min, &profiles, m0.as_ref().map(|m| (m, &t_grid[..], &phi)), c.dim, params, &line, &radial)?;

    let labels: Vec<String> = profiles.iter().map(|p| p.label().to_string()).collect();
    let table = |name: &str, t: &conemult::characterization::QuantityTable| {
        ctx.out.write_csv(
            name,
            &["index", "label", "value", "divergent"],
            t.entries.iter().zip(&labels).map(|(e, l)| {
                vec![e.index.to_string(), l.clone(), num(e.value), e.divergent.to_string()]
            }),
        )
    };
    table("condition_iv.csv", &rep.quantity_iv)?;
    table("condition_v.csv", &rep.quantity_v)?;
    ctx.out.write_csv(
        "condition_iv_nested.csv",
        &["index", "truncation", "value"],
        rep.quantity_iv.entries.iter().flat_map(|e| {
            rep.truncations.iter().zip(&e.nested).map(move |(r, v)| vec![e.index.to_string(), num(*r), num(*v)])
        }),
    )?;
    ctx.out.write_csv(
        "ratio_v_over_iv.csv",
        &["index", "ratio"],
        rep.ratio_v_over_iv.iter().enumerate().map(|(i, r)| {
            vec![(c.k_min + i as i32).to_string(), r.map_or_else(|| "nan".into(), num)]
        }),
    )?;
    if let Some(m) = &rep.m0 {
        ctx.out.write_csv("m0.csv", &["t", "value"], m.t.iter().zip(&m.values).map(|(t, v)| vec![num(*t), num(*v)]))?;
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        labels: &'a [String],
        report: &'a conemult::characterization::CharacterizationReport,
    }
    ctx.out.write_summary("characterize", ctx.cfg.seed, &Summary { labels: &labels, report: &rep })
}

#[derive(Serialize)]
struct ScanSummaryRow {
    p: f64,
    prediction: f64,
    prediction_alt: f64,
    formula_gap: f64,
    estimate: Option<f64>,
    estimate_minus_prediction: Option<f64>,
}

pub fn br_scan(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.br_scan;
    let lambdas = lambda_grid(c.lambda_min, c.lambda_max, c.lambda_step);
    let truncation = c.truncations.iter().copied().fold(0.0, f64::max);
    let spec = ScanSpec { line: LineSpec { half_width: c.half_width, n: c.n, truncation }, truncations: c.truncations.clone() };
    let rows: Vec<ScanResult> = par_map(&c.p, ctx.threads, |&p| critical_scan(c.dim, &[p], &lambdas, &spec))
        .into_iter()
        .map(|r| r.map(|mut v| v.remove(0)))
        .collect::<conemult::Result<_>>()?;

    let long = |pick: fn(&conemult::bochner_riesz::ScanPoint) -> &Vec<f64>| {
        let mut out = Vec::new();
        for r in &rows {
            for q in &r.points {
                for (t, v) in c.truncations.iter().zip(pick(q)) {
                    out.push(vec![num(r.p), num(q.lambda), num(*t), num(*v)]);
                }
            }
        }
        out
    };
    ctx.out.write_csv("scan_values.csv", &["p", "lambda", "truncation", "value"], long(|q| &q.values))?;
    ctx.out.write_csv("scan_top_blocks.csv", &["p", "lambda", "truncation", "top_block"], long(|q| &q.top_blocks))?;
    ctx.out.write_csv(
        "scan_divergent.csv",
        &["p", "lambda", "divergent"],
        rows.iter().flat_map(|r| r.points.iter().map(move |q| vec![num(r.p), num(q.lambda), q.divergent.to_string()])),
    )?;

    #[derive(Serialize)]
    struct Summary {
        dim: usize,
        lambdas: usize,
        truncations: Vec<f64>,
        results: Vec<ScanSummaryRow>,
    }
    let results = rows
        .iter()
        .map(|r| ScanSummaryRow {
            p: r.p,
            prediction: r.prediction,
            prediction_alt: r.prediction_alt,
            formula_gap: r.formula_gap,
            estimate: r.estimate,
            estimate_minus_prediction: r.estimate.map(|e| e - r.prediction),
        })
        .collect();
    ctx.out.write_summary(
        "br-scan",
        ctx.cfg.seed,
        &Summary { dim: c.dim, lambdas: lambdas.len(), truncations: c.truncations.clone(), results },
    )
}

pub fn wave_check_cmd(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.wave_check;
    let sign = match c.sign {
        Sign::Plus => WaveSign::Plus,
        Sign::Minus => WaveSign::Minus,
    };
    let theta = default_theta();
    let ns: Vec<u32> = (c.n_min..=c.n_max).collect();
    let decs = par_map(&ns, ctx.threads, |&n| {
        log::info!("wave decomposition n = {n}");
        decompose(n, c.dim, &theta, sign)
    })
    .into_iter()
    .collect::<conemult::Result<Vec<_>>>()?;
    let chk = WaveCheck::from_decompositions(c.dim, decs)?;

    ctx.out.write_csv(
        "omega_l1.csv",
        &["n", "omega_l1", "error_sup", "error_tail_exponent"],
        chk.decompositions
            .iter()
            .map(|w| vec![w.n.to_string(), num(w.omega_l1), num(w.error_sup), num(w.error_tail_exponent)]),
    )?;
    let curve = |pick: fn(&conemult::wave::WaveDecomposition) -> &Vec<(f64, conemult::Complex64)>| {
        chk.decompositions
            .iter()
            .flat_map(|w| pick(w).iter().map(move |(r, v)| vec![w.n.to_string(), num(*r), num(v.re), num(v.im)]))
            .collect::<Vec<_>>()
    };
    ctx.out.write_csv("omega.csv", &["n", "rho", "re", "im"], curve(|w| &w.omega))?;
    ctx.out.write_csv("error.csv", &["n", "radius", "re", "im"], curve(|w| &w.error))?;

    #[derive(Serialize)]
    struct Row {
        n: u32,
        omega_l1: f64,
        error_sup: f64,
        error_tail_exponent: f64,
    }
    #[derive(Serialize)]
    struct Summary {
        dim: usize,
        sign: Sign,
        per_n: Vec<Row>,
        omega_l1_ratio: f64,
        error_decay_rate: f64,
        normalized_error_decay_rate: f64,
    }
    let per_n = chk
        .decompositions
        .iter()
        .map(|w| Row { n: w.n, omega_l1: w.omega_l1, error_sup: w.error_sup, error_tail_exponent: w.error_tail_exponent })
        .collect();
    ctx.out.write_summary(
        "wave-check",
        ctx.cfg.seed,
        &Summary {
            dim: c.dim,
            sign: c.sign,
            per_n,
            omega_l1_ratio: chk.omega_l1_ratio,
            error_decay_rate: chk.error_decay_rate,
            normalized_error_decay_rate: chk.normalized_error_decay_rate,
        },
    )
}

fn write_witness(out: &OutputDir, est: &OpNormEstimate) -> Result<()> {
    out.write_csv(
        "witness.csv",
        &["parameter", "value"],
        est.witness.params.iter().map(|(k, v)| vec![k.clone(), num(*v)]),
    )
}

pub fn sph_probe(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.sph_probe;
    let spec = SphSpec { r_max: c.r_max, n_radii: c.n_radii, beta_width: c.beta_width, out_spacing: c.out_spacing };
    let est = sph_opnorm_lower(c.dim, c.p, &spec, c.budget, ctx.cfg.seed)?;
    write_witness(ctx.out, &est)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        dim: usize,
        spec: SphSpec,
        estimate: &'a OpNormEstimate,
    }
    ctx.out.write_summary("sph-probe", ctx.cfg.seed, &Summary { dim: c.dim, spec, estimate: &est })
}

fn families(names: &[String]) -> Result<Vec<WitnessFamily>> {
    Ok(names.iter().map(|n| WitnessFamily::from_name(n)).collect::<conemult::Result<_>>()?)
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 || hi == lo {
        return vec![lo];
    }
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

pub fn opnorm(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.opnorm;
    let axes = cube(c.dim, c.extent, c.n)?;
    let params = LorentzParams::new(c.p, c.nu)?;
    let fams = families(&c.families)?;
    let seed = ctx.cfg.seed;

    #[derive(Serialize)]
    struct Grid {
        dim: usize,
        extent: f64,
        n: usize,
    }
    let grid = Grid { dim: c.dim, extent: c.extent, n: c.n };
    match c.mode {
        OpnormMode::Estimate => {
            let symbol = c.multiplier.build(&axes)?;
            let op = |f: &GridField| apply_multiplier(f, &symbol);
            let est = estimate_lower(&op, &axes, params, &fams, c.budget, seed)?;
            write_witness(ctx.out, &est)?;
            #[derive(Serialize)]
            struct Summary<'a> {
                mode: OpnormMode,
                grid: Grid,
                multiplier: &'a MultiplierSpec,
                estimate: &'a OpNormEstimate,
            }
            ctx.out.write_summary("opnorm", seed, &Summary { mode: c.mode, grid, multiplier: &c.multiplier, estimate: &est })
        }
        OpnormMode::Equivlor => {
            let m0 = c.multiplier.radial().context("equivlor needs a radial multiplier")?;
            let (lo, hi) = if c.t_min == 0.0 && c.t_max == 0.0 { resolvable_dilations(&axes) } else { (c.t_min, c.t_max) };
            let t_grid = geometric(lo, hi, c.t_count);
            let rep = equivlor_experiment(m0, &axes, params, &t_grid, &fams, c.budget, seed)?;
            write_witness(ctx.out, &rep.lhs)?;
            ctx.out.write_csv(
                "equivlor_points.csv",
                &["t", "ratio", "raw", "flagged"],
                rep.points.iter().map(|q| vec![num(q.t), num(q.ratio), num(q.raw), q.flagged.to_string()]),
            )?;
            #[derive(Serialize)]
            struct Summary<'a> {
                mode: OpnormMode,
                grid: Grid,
                multiplier: &'a MultiplierSpec,
                report: &'a conemult::opnorm::EquivlorReport,
            }
            ctx.out.write_summary("opnorm", seed, &Summary { mode: c.mode, grid, multiplier: &c.multiplier, report: &rep })
        }
    }
}

pub fn apply(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.apply;
    let file = File::open(&c.input).map_err(|e| input_error(&c.input, e))?;
    let f = read_field(BufReader::new(file)).map_err(|e| input_error(&c.input, e))?;
    if f.representation() != Representation::Space {
        return Err(input_error(&c.input, "input field must be in the space representation"));
    }
    c.multiplier.validate(f.ndim())?;
    let wrap = f.boundary_mass_fraction(0.5);
    if wrap > conemult::multiplier::DEFAULT_WRAP_THRESHOLD {
        log::warn!("input carries {wrap:.2e} of its mass in the outer half of the box; wrap-around may matter");
    }
    let symbol = c.multiplier.build(f.axes())?;
    let g = apply_multiplier(&f, &symbol)?;
    let mut bytes = Vec::new();
    write_field(&g, &mut bytes)?;
    ctx.out.write_bytes(&c.output, &bytes)?;
    if g.len() <= c.csv_limit {
        let d = g.ndim();
        let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        header.extend(["re".to_string(), "im".to_string()]);
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut x = vec![0.0; d];
        let rows: Vec<Vec<String>> = (0..g.len())
            .map(|i| {
                g.coords_into(i, &mut x);
                let mut row: Vec<String> = x.iter().map(|v| num(*v)).collect();
                row.push(num(g.values()[i].re));
                row.push(num(g.values()[i].im));
                row
            })
            .collect();
        let stem = c.output.trim_end_matches(".cmgf");
        ctx.out.write_csv(&format!("{stem}.csv"), &header, rows)?;
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        axes: &'a [Axis],
        multiplier: &'a MultiplierSpec,
        output: &'a str,
        input_l2: f64,
        output_l2: f64,
        output_max_abs: f64,
        output_outer_half_mass: f64,
    }
    ctx.out.write_summary(
        "apply",
        ctx.cfg.seed,
        &Summary {
            axes: f.axes(),
            multiplier: &c.multiplier,
            output: &c.output,
            input_l2: f.lp_norm(2.0),
            output_l2: g.lp_norm(2.0),
            output_max_abs: g.max_abs(),
            output_outer_half_mass: g.boundary_mass_fraction(0.5),
        },
    )
}
