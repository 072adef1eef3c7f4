//! End-to-end checks of the `tdyn` binary.

use std::path::Path;
use std::process::{Command, Output};

fn tdyn(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdyn")).args(args).env("TDYN_OUTPUT_ROOT", root).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn preset_without_name_lists_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = tdyn(&["preset"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["ellipse-convergence", "particle-on-substrate", "tilted-contact", "split", "merge", "kernel-info"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
}

#[test]
fn preset_run_writes_report_under_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = tdyn(&["preset", "s-shape", "--set", "grid.n=64", "--set", "run.steps=4", "--sequential"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run = dir.path().join("s-shape");
    for f in [
        "report.csv",
        "energy.csv",
        "events.jsonl",
        "timings.csv",
        "notes.txt",
        "config.toml",
        "snapshots/step_000004.pgm",
    ] {
        assert!(run.join(f).exists(), "{f}");
    }
    let config = std::fs::read_to_string(run.join("config.toml")).unwrap();
    assert!(config.contains("n = 64"), "{config}");
    assert!(std::fs::read_to_string(run.join("notes.txt")).unwrap().contains("desk-scale"));
}

#[test]
fn simulate_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("circle.toml");
    std::fs::write(
        &cfg,
        "name = \"circle\"\n[grid]\nn = 64\n[anisotropy]\nkind = \"constant\"\nvalue = 1.0\n\
         [kernel]\nfamily = \"gaussian\"\n[shape]\nkind = \"circle\"\ncenter = [0.0, 0.0]\nradius = 2.0\n\
         [run]\nalgorithm = \"threshold\"\ndt = 0.01\nsteps = 3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = tdyn(&["simulate", cfg.to_str().unwrap(), "--output-root", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let energy = std::fs::read_to_string(out.join("circle/energy.csv")).unwrap();
    assert_eq!(energy.lines().count(), 5, "{energy}");
}

#[test]
fn kernel_info_tabulates_requested_directions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.toml");
    std::fs::write(
        &cfg,
        "name = \"k\"\n[grid]\nn = 128\n[anisotropy]\nkind = \"single-mode\"\namplitude = 0.05\nmode = 4.0\nphase = 0.0\n\
         [kernel]\nfamily = \"bbc\"\n[run]\nalgorithm = \"threshold\"\ndt = 0.01\nsteps = 1\n",
    )
    .unwrap();
    let o = tdyn(&["kernel-info", cfg.to_str().unwrap(), "--directions", "8"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(dir.path().join("k/kernel_directions.csv")).unwrap();
    assert_eq!(table.lines().count(), 9, "{table}");
}

#[test]
fn converge_rejects_other_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.toml");
    std::fs::write(
        &cfg,
        "name = \"k\"\n[grid]\nn = 64\n[anisotropy]\nkind = \"constant\"\nvalue = 1.0\n[kernel]\nfamily = \"gaussian\"\n\
         [shape]\nkind = \"circle\"\ncenter = [0.0, 0.0]\nradius = 1.0\n[run]\nalgorithm = \"threshold\"\ndt = 0.01\nsteps = 1\n",
    )
    .unwrap();
    let o = tdyn(&["converge", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("run.algorithm"), "{}", stderr(&o));
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = tdyn(&["preset", "no-such-preset"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown preset"));

    let o = tdyn(&["preset", "split", "--set", "grid.n=-3"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));

    let o = tdyn(&["simulate", dir.path().join("missing.toml").to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("missing.toml"), "{}", stderr(&o));
}
