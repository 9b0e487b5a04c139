//! Acceptance criterion 8: every subcommand, re-run with the same config and
//! seed, writes byte-identical outputs (the metadata file aside).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

mod common;
use common::*;

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "meta.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

fn main() {
    let t = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let cfg = quick_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    let mut failures = Vec::new();
    let mut files = 0;
    for sub in SUBCOMMANDS {
        let runs: Vec<_> = ["first", "second"]
            .iter()
            .map(|tag| {
                let out = tmp.path().join(format!("{sub}-{tag}"));
                let res = conemult(&[sub, "--config", cfg, "--seed", "11", "--out", out.to_str().unwrap()]);
                (res.status.success(), out)
            })
            .collect();
        if !runs.iter().all(|(ok, _)| *ok) {
            failures.push(format!("{sub}: run failed"));
            continue;
        }
        let (a, b) = (outputs(&runs[0].1), outputs(&runs[1].1));
        files += a.len();
        if !a.contains_key("summary.json") {
            failures.push(format!("{sub}: no summary"));
        }
        if a != b {
            let diff: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
            failures.push(format!("{sub}: differing files {diff:?}"));
        }
    }
    let pass = failures.is_empty();
    println!(
        "criterion 8 cli determinism: {} ({:.1} s) {} subcommands, {files} output files compared byte for byte{}",
        if pass { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64(),
        SUBCOMMANDS.len(),
        if pass { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    if !pass {
        std::process::exit(1);
    }
}
