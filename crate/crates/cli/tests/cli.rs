//! End-to-end checks of the `smc-bench` binary: artifact inventory, CSV
//! format, determinism, validation errors and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smc-bench"))
}

/// Short scenario so the full compare stays fast.
const SHORT_SCENARIO: &str = "\
[scenario]
duration = 0.05

[disturbance]
initial = 1.2
event = 0.02 0.0
event = 0.04 1.2
";

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.cfg");
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn validate_accepts_the_default_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let out = run_ok(bin().arg("validate").arg("--scenario").arg(&scenario));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("scenario OK"), "{stdout}");
}

#[test]
fn validate_rejects_bad_gains_with_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "[controller.stsmc]\nk1 = 2\nk2 = 3\n",
    );
    let out = bin()
        .arg("validate")
        .arg("--scenario")
        .arg(&scenario)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("k1"), "{stderr}");
}

#[test]
fn compare_emits_the_full_artifact_set() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let out_dir = dir.path().join("out");
    run_ok(
        bin()
            .arg("compare")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&out_dir),
    );

    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();

    let csvs = names.iter().filter(|n| n.ends_with(".csv")).count();
    let svgs = names.iter().filter(|n| n.ends_with(".svg")).count();
    // 12 per-run CSVs + 2 summaries + 4 overlay plots.
    assert_eq!(csvs, 14, "csv files: {names:?}");
    assert_eq!(svgs, 4, "svg files: {names:?}");
    for kind in ["csmc", "ismc", "tsmc", "fosmc", "asmc", "stsmc"] {
        for variant in ["nominal", "disturbed"] {
            assert!(names.contains(&format!("{kind}_{variant}.csv")));
        }
    }
}

#[test]
fn run_csv_format_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let out_dir = dir.path().join("out");
    run_ok(
        bin()
            .arg("run")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&out_dir)
            .arg("--controllers")
            .arg("csmc")
            .arg("--no-plots"),
    );

    let text = fs::read_to_string(out_dir.join("csmc.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,omega,omega_ref,iq_cmd,iq_applied,error,s,t_load");
    // 0.05 s at 1e-4 sampling: 500 rows + header.
    assert_eq!(lines.len(), 501);
    assert!(!text.contains('\r'), "expected UNIX newlines");

    // Time column strictly increasing at the sampling period.
    let t: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse::<f64>().unwrap())
        .collect();
    for w in t.windows(2) {
        assert!((w[1] - w[0] - 1e-4).abs() < 1e-9);
    }
}

#[test]
fn compare_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(
            bin()
                .arg("compare")
                .arg("--scenario")
                .arg(&scenario)
                .arg("--out")
                .arg(out)
                .arg("--controllers")
                .arg("csmc,stsmc,fosmc"),
        );
    }
    for entry in fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        let a = fs::read(out_a.join(&name)).unwrap();
        let b = fs::read(out_b.join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between reruns");
    }
}

#[test]
fn bench_writes_the_complexity_table() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let out_dir = dir.path().join("out");
    let out = run_ok(
        bin()
            .arg("bench")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&out_dir)
            .arg("--bench-updates")
            .arg("4000"),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("relative"), "{stdout}");

    let text = fs::read_to_string(out_dir.join("complexity.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "controller,extra_states,mean_update_ns,relative_cost,memory_bytes,static_mults"
    );
    assert_eq!(lines.len(), 7);
    // The fractional variant ends up strictly most expensive.
    let fosmc = lines.iter().find(|l| l.starts_with("fosmc")).unwrap();
    let rel: f64 = fosmc.split(',').nth(3).unwrap().parse().unwrap();
    assert!(rel >= 2.0);
}

#[test]
fn env_var_overrides_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), SHORT_SCENARIO);
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");
    run_ok(
        bin()
            .arg("run")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&flag_dir)
            .arg("--controllers")
            .arg("csmc")
            .arg("--no-plots")
            .env("SMC_BENCH_OUT", &env_dir),
    );
    assert!(env_dir.join("csmc.csv").exists());
    assert!(!flag_dir.exists());
}

#[test]
fn duplicate_scenario_keys_fail_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "[plant]\nrs = 0.9\nrs = 1.1\n");
    let out = bin()
        .arg("validate")
        .arg("--scenario")
        .arg(&scenario)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn run_failures_exit_with_code_3_but_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    // A reference beyond f64 range makes the command overflow immediately.
    let scenario = write_scenario(
        dir.path(),
        "[scenario]\nomega_ref = 1e308\nduration = 0.01\n[disturbance]\ninitial = 0.0\n",
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("run")
        .arg("--scenario")
        .arg(&scenario)
        .arg("--out")
        .arg(&out_dir)
        .arg("--controllers")
        .arg("csmc")
        .arg("--no-plots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(out_dir.join("summary.csv").exists());
}
