//! Runs the binary through a full synth -> fit -> predict -> decide ->
//! evaluate -> sweep pipeline inside one directory.

#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

pub const PLAN: &str = "\
# bands on age, pooled groups on grp
traffic_light age: 3,6
linear prior
categorical grp
linear flag
interact age>=3 flag
";

pub const SYNTH_FEATURES: &str = "age:ordinal,prior:continuous,grp:categorical,flag:binary";
pub const SYNTH_COEFFICIENTS: &str = "-3.2,0.15,1.5,0.4,0.8";

pub fn costcut(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_costcut"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn checked(dir: &Path, args: &[&str]) -> Output {
    let out = costcut(dir, args);
    assert!(
        out.status.success(),
        "costcut {args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Output files of one pipeline run, in a fixed order.
pub const PIPELINE_FILES: [&str; 9] = [
    "train.csv",
    "plan.txt",
    "model.txt",
    "model.trace",
    "scores.csv",
    "decisions.csv",
    "report.txt",
    "report.json",
    "sweep.csv",
];

pub fn run_pipeline(dir: &Path) {
    checked(dir, &[
        "synth", "--n", "4000", "--coefficients", SYNTH_COEFFICIENTS,
        "--features", SYNTH_FEATURES, "--seed", "20240611", "--out", "train.csv",
    ]);
    fs::write(dir.join("plan.txt"), PLAN).unwrap();
    let fit = checked(dir, &[
        "fit", "--data", "train.csv", "--outcome", "y", "--plan", "plan.txt",
        "--stepwise", "aic", "--out", "model.txt", "--trace", "model.trace",
    ]);
    fs::write(dir.join("fit.stdout"), &fit.stdout).unwrap();
    checked(dir, &["predict", "--model", "model.txt", "--data", "train.csv", "--out", "scores.csv"]);
    checked(dir, &["decide", "--data", "scores.csv", "--cost-ratio", "10", "--out", "decisions.csv"]);
    checked(dir, &[
        "evaluate", "--data", "scores.csv", "--outcome", "y", "--cost-ratio", "10", "--out", "report.txt",
    ]);
    checked(dir, &[
        "evaluate", "--data", "scores.csv", "--outcome", "y", "--cost-ratio", "10",
        "--format", "machine", "--out", "report.json",
    ]);
    checked(dir, &[
        "sweep", "--data", "scores.csv", "--outcome", "y", "--ratios", "1,2,5,10,15,20,50,100",
        "--out", "sweep.csv",
    ]);
}
