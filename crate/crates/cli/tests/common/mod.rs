#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conemult::field_io::write_field;
use conemult::grid::{cube, GridField};
use conemult::Complex64;

pub fn conemult(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conemult")).args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = conemult(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

pub fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

pub fn samples_csv(dir: &Path) -> PathBuf {
    let p = dir.join("samples.csv");
    std::fs::write(&p, "value,weight\n1,1\n2,1\n").unwrap();
    p
}

/// A Gaussian packet on a 32×32 grid in the binary field format.
pub fn field_file(dir: &Path) -> PathBuf {
    let f = GridField::from_fn(cube(2, 8.0, 32).unwrap(), |x| {
        Complex64::from_polar((-(x[0] * x[0] + x[1] * x[1])).exp(), 2.0 * x[0])
    })
    .unwrap();
    let p = dir.join("input.cmgf");
    let mut bytes = Vec::new();
    write_field(&f, &mut bytes).unwrap();
    std::fs::write(&p, bytes).unwrap();
    p
}

/// Small but complete settings for every subcommand.
pub fn quick_config(dir: &Path) -> PathBuf {
    let samples = samples_csv(dir);
    let field = field_file(dir);
    let text = format!(
        r#"seed = 7

[lorentz_norm]
input = {samples:?}
p = 1.5
nu = inf

[characterize]
dim = 3
line = {{ half_width = 4.0, n = 16384, truncation = 400.0 }}
radial = {{ r_max = 60.0, n = 1200 }}
profiles = [
  {{ kind = "mollifier", center = 1.0, width = 0.2 }},
  {{ kind = "tent", center = 1.0, half_width = 0.1 }},
]
m0 = {{ kind = "br_radial", lambda = 1.0, radius = 1.0 }}
t_grid = {{ lo = -1, hi = 1, per_octave = 2 }}

[br_scan]
p = [1.142857142857143]
lambda_min = 0.5
lambda_max = 1.5
lambda_step = 0.1
n = 65536
truncations = [250.0, 500.0, 1000.0, 2000.0]

[wave_check]
n_min = 2
n_max = 4

[sph_probe]
dim = 3
budget = 15

[opnorm]
n = 32
extent = 8.0
budget = 25

[apply]
input = {field:?}
multiplier = {{ kind = "half_space", axis = 0 }}
"#
    );
    let p = dir.join("quick.toml");
    std::fs::write(&p, text).unwrap();
    p
}

pub const SUBCOMMANDS: [&str; 7] = ["lorentz-norm", "characterize", "br-scan", "wave-check", "sph-probe", "opnorm", "apply"];
