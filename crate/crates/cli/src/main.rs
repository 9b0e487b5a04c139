use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;
mod output;
mod specs;

use config::ConfigError;
use output::{OutputDir, META_SCHEMA};

/// Numerical experiments on radial and conical Fourier multipliers.
#[derive(Parser)]
#[command(name = "conemult", version)]
struct Cli {
    /// TOML configuration file; every key has a default.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Random seed (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Override a config key of the subcommand's section, e.g. `--set p=1.5`
    /// or `--set line.n=131072`. Values are parsed as TOML.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Lorentz quasi-norm of a weighted sample set read from CSV.
    LorentzNorm,
    /// Line and radial characterization functionals of a profile family.
    Characterize,
    /// Critical Bochner–Riesz exponent scan.
    BrScan,
    /// Wave decomposition of the averaging kernel over a range of n.
    WaveCheck,
    /// Lower bound for the spherical superposition operator.
    SphProbe,
    /// Operator-norm lower bounds and dilation experiments on a grid.
    Opnorm,
    /// Applies a named multiplier to a field file.
    Apply,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::LorentzNorm => "lorentz-norm",
            Command::Characterize => "characterize",
            Command::BrScan => "br-scan",
            Command::WaveCheck => "wave-check",
            Command::SphProbe => "sph-probe",
            Command::Opnorm => "opnorm",
            Command::Apply => "apply",
        }
    }

    fn section(self) -> String {
        self.name().replace('-', "_")
    }
}

const TOP_LEVEL: [&str; 9] =
    ["seed", "threads", "lorentz_norm", "characterize", "br_scan", "wave_check", "sph_probe", "opnorm", "apply"];

fn overrides(cli: &Cli) -> Result<Vec<(String, String)>, ConfigError> {
    let section = cli.command.section();
    cli.set
        .iter()
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got {s:?}")))?;
            let k = k.trim();
            let head = k.split('.').next().unwrap_or("");
            let key = if TOP_LEVEL.contains(&head) { k.to_string() } else { format!("{section}.{k}") };
            Ok((key, v.trim().to_string()))
        })
        .collect()
}

fn validate(cfg: &config::Config, cmd: Command) -> Result<(), ConfigError> {
    match cmd {
        Command::LorentzNorm => cfg.lorentz_norm.validate(),
        Command::Characterize => cfg.characterize.validate(),
        Command::BrScan => cfg.br_scan.validate(),
        Command::WaveCheck => cfg.wave_check.validate(),
        Command::SphProbe => cfg.sph_probe.validate(),
        Command::Opnorm => cfg.opnorm.validate(),
        Command::Apply => cfg.apply.validate(),
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    schema: &'static str,
    version: &'static str,
    subcommand: &'a str,
    args: Vec<String>,
    started_unix: f64,
    elapsed_seconds: f64,
    threads: usize,
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let mut cfg = config::load(cli.config.as_deref(), &overrides(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    validate(&cfg, cli.command)?;
    let threads = match cfg.threads {
        0 => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        t => t,
    };
    let out = OutputDir::create(&cli.out)?;
    out.write_bytes("config.toml", config::to_toml(&cfg).as_bytes())?;
    let ctx = commands::Ctx { cfg: &cfg, out: &out, threads };
    log::info!("running {} with seed {}", cli.command.name(), cfg.seed);
    match cli.command {
        Command::LorentzNorm => commands::lorentz_norm(&ctx)?,
        Command::Characterize => commands::characterize_cmd(&ctx)?,
        Command::BrScan => commands::br_scan(&ctx)?,
        Command::WaveCheck => commands::wave_check_cmd(&ctx)?,
        Command::SphProbe => commands::sph_probe(&ctx)?,
        Command::Opnorm => commands::opnorm(&ctx)?,
        Command::Apply => commands::apply(&ctx)?,
    }
    out.write_json(
        "meta.json",
        &Meta {
            schema: META_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            subcommand: cli.command.name(),
            args: std::env::args().collect(),
            started_unix: started,
            elapsed_seconds: clock.elapsed().as_secs_f64(),
            threads,
        },
    )?;
    Ok(())
}

/// 2 for configuration and input errors, 3 when a numerical budget is
/// exhausted or a computation produced non-finite values, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<conemult::Error>() {
            return match e {
                conemult::Error::Budget(_) | conemult::Error::NonFinite { .. } => 3,
                conemult::Error::Domain(_) | conemult::Error::GridMismatch(_) => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
