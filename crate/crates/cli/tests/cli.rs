//! End-to-end command behaviour: exit codes, file outputs, error text.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fsonet-cli-test-{}-{tag}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    dir
}

fn fsonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsonet"))
        .args(args)
        .output()
        .expect("binary must start")
}

fn scenario_args<'a>(sub: &'a str, cfg: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![sub, "--scenario", cfg, "--out", out]
}

#[test]
fn unknown_subcommand_exits_one() {
    let output = fsonet(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown subcommand"));
}

#[test]
fn missing_scenario_flag_exits_one() {
    let output = fsonet(&["passes", "--out", "/tmp/nowhere"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("--scenario is required"));
}

#[test]
fn missing_config_file_exits_two() {
    let out = out_dir("missing-cfg");
    let output = fsonet(&scenario_args(
        "passes",
        "/no/such/file.cfg",
        out.to_str().unwrap(),
    ));
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn config_error_exits_two_with_message() {
    let dir = out_dir("bad-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "[satellite]\nnonsense here\n").unwrap();
    let output = fsonet(&scenario_args(
        "passes",
        cfg.to_str().unwrap(),
        dir.to_str().unwrap(),
    ));
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 2"));
}

#[test]
fn availability_with_uncovered_window_exits_two() {
    let out = out_dir("uncovered");
    let cfg = fixture("demo_grid.cfg");
    // The demo grid frames end 2023-06-03; push the window past them.
    let output = fsonet(&[
        "availability",
        "--scenario",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "defaults.window_end=2023-06-10T00:00:00Z",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("does not cover"), "stderr was: {stderr}");
}

#[test]
fn pipeline_subcommands_produce_their_tables() {
    let cfg_path = fixture("demo_grid.cfg");
    let cfg = cfg_path.to_str().unwrap();
    for (sub, file) in [
        ("passes", "passes.csv"),
        ("weather-stats", "weather_stats.csv"),
        ("linkbudget", "linkbudget.csv"),
        ("availability", "availability_monthly.csv"),
        ("throughput", "throughput_monthly.csv"),
        ("correlate", "correlation.csv"),
        ("synth-weather", "synth_weather.csv"),
    ] {
        let out = out_dir(sub);
        let output = fsonet(&scenario_args(sub, cfg, out.to_str().unwrap()));
        assert_eq!(
            output.status.code(),
            Some(0),
            "{sub} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let table = out.join(file);
        assert!(table.exists(), "{sub} did not write {file}");
        let text = std::fs::read_to_string(&table).unwrap();
        assert!(text.lines().count() >= 1, "{file} is empty");
        std::fs::remove_dir_all(&out).ok();
    }
}

#[test]
fn throughput_also_writes_per_pass_table() {
    let out = out_dir("per-pass");
    let cfg = fixture("demo_grid.cfg");
    let output = fsonet(&scenario_args(
        "throughput",
        cfg.to_str().unwrap(),
        out.to_str().unwrap(),
    ));
    assert_eq!(output.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("per_pass.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "pass_id,station,c_i_bps,bits");
    assert!(
        text.lines().count() > 1,
        "demo scenario must produce passes"
    );
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn sweep_on_demo_fixture_writes_summary_and_charts() {
    let out = out_dir("demo-sweep");
    let cfg = fixture("demo_grid.cfg");
    let output = fsonet(&scenario_args(
        "sweep",
        cfg.to_str().unwrap(),
        out.to_str().unwrap(),
    ));
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    // The demo window sits half a year from the bundled TLE epoch.
    assert!(
        String::from_utf8_lossy(&output.stderr).contains("warning:"),
        "expected an epoch-distance warning"
    );
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "configuration,a_overall_pct,t_gbits,pdt_pct,outage_pct"
    );
    assert_eq!(summary.lines().count(), 3, "two configurations plus header");
    // Sub-month window: monthly charts are skipped, PDT and heatmap remain.
    assert!(out.join("charts/pdt.svg").exists());
    assert!(out.join("charts/correlation_heatmap.svg").exists());
    assert!(out.join("pair/buffer.csv").exists());
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn seed_override_changes_synthetic_weather() {
    let cfg_path = fixture("terrasarx_europe.cfg");
    let cfg = cfg_path.to_str().unwrap();
    let run = |seed: &str, tag: &str| {
        let out = out_dir(tag);
        let output = fsonet(&[
            "synth-weather",
            "--scenario",
            cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--set",
            "defaults.window_end=2023-06-08T00:00:00Z",
        ]);
        assert_eq!(output.status.code(), Some(0));
        let text = std::fs::read_to_string(out.join("synth_weather.csv")).unwrap();
        std::fs::remove_dir_all(&out).ok();
        text
    };
    let a = run("1", "seed-a1");
    let b = run("2", "seed-b");
    let a2 = run("1", "seed-a2");
    assert_eq!(a, a2, "same seed must reproduce the series");
    assert_ne!(a, b, "different seeds must differ");
}
