use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use levy_galerkin_cli::RunConfig;
use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn binary() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_levy-galerkin"));
    c.env_remove("LEVY_GALERKIN_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_configs_round_trip() {
    for name in ["dyadic.toml", "decay.toml", "nse.toml", "blowup.toml"] {
        let text = std::fs::read_to_string(config(name)).unwrap();
        let cfg = RunConfig::parse(&text).unwrap();
        let emitted = cfg.emit();
        let again = RunConfig::parse(&emitted).unwrap();
        assert_eq!(again, cfg, "{name}");
        assert_eq!(again.emit(), emitted, "{name}");
    }
}

#[test]
fn decay_run_writes_versioned_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--config", config("decay.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory_0.csv")).unwrap();
    assert!(csv.starts_with("t,h_norm,v_norm,xi_sq,u_0,u_1,"));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["seed"], 42);
    assert_eq!(summary["config"]["ensemble"]["seed"], 42);
    assert_eq!(summary["config"]["solver"]["t0"], 1.0);
    assert_eq!(summary["results"]["paths"][0]["status"], "ok");
}

#[test]
fn blowup_scenario_exits_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--config", config("blowup.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blow-up"));
    assert_eq!(json(&dir.path().join("summary.json"))["results"]["paths"][0]["status"], "error");
}

#[test]
fn h3_violation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // θ²·m2/ν = 0.225 · 1 / 0.1 = 2.25
    let text = "[model]\nname = \"dyadic\"\nmodes = 4\nvisc = 0.1\n\
                [measure]\nfamily = \"compound_gaussian\"\nrate = 1.0\nsd = 1.0\n\
                [coefficients]\ng = \"gradient\"\ng_theta = 0.4743416490252569\n\
                [initial]\nu0 = [1.0]\n[solver]\nhorizon = 1.0\ndt = 0.1\n";
    let p = write_config(dir.path(), text);
    let out = run(&["simulate", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(H3)") && err.contains("L_2,L_5∈[0,2)"), "{err}");
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn unknown_key_and_bad_usage_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("decay.toml")).unwrap().replace("dt = 0.01", "dt = 0.01\nstep = 3");
    let p = write_config(dir.path(), &text);
    let out = run(&["simulate", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("step") && err.contains("line"), "{err}");

    assert_eq!(run(&["simulate", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["explode", "--config", "x"]).status.code(), Some(2));
    let bad = run(&["simulate", "--config", config("decay.toml").to_str().unwrap(), "--override", "solver.dt"]);
    assert_eq!(bad.status.code(), Some(2));
}

fn structure_with_c_b(dir: &Path, c_b: f64) -> (Option<i32>, Value) {
    let over = format!("model.c_b={c_b}");
    let out = run(&[
        "verify",
        "--config",
        config("dyadic.toml").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--override",
        "verify.suites=[\"structure\"]",
        "--override",
        "verify.structure_samples=20000",
        "--override",
        &over,
    ]);
    (out.status.code(), json(&dir.join("report_structure.json")))
}

/// The sup of `|b|/(|u|·‖v‖·|w|)` is `1/sqrt(ν)`, attained at `u = e_n`,
/// `w = e_{n+1}`, `v ∝ e_n`: half the certified constant is tight and
/// anything below it is caught.
#[test]
fn b3_search_is_tight_at_half_the_certified_constant() {
    let certified = 2.0 / 0.1f64.sqrt();
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = structure_with_c_b(dir.path(), 0.5 * certified);
    assert_eq!(code, Some(0));
    let ascent = report["report"]["structure"]["b3_ascent_ratio"].as_f64().unwrap();
    assert!((ascent - 1.0).abs() < 1e-12, "{ascent}");

    let (code, report) = structure_with_c_b(dir.path(), 0.45 * certified);
    assert_eq!(code, Some(1));
    assert_eq!(report["pass"], false);
    assert_eq!(report["report"]["b3_pass"], false);
    assert_eq!(report["report"]["b1_pass"], true);
}

#[test]
fn zero_noise_statistics_pass_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--config",
        config("decay.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--override",
        "verify.suites=[\"coefficients\", \"noise\", \"energy\"]",
        "--override",
        "verify.noise_paths=500",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let noise = json(&dir.path().join("report_noise.json"));
    assert_eq!(noise["report"]["compensated"]["jump_isometry_expected"], 0.0);
    assert_eq!(noise["report"]["compensated"]["wiener_isometry"]["mean"], 0.0);
    let energy = json(&dir.path().join("report_energy.json"));
    assert_eq!(energy["report"]["order_min"], 0.9);
}

#[test]
fn linear_scenario_converges_after_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["converge", "--config", config("decay.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("report_converge.json"));
    let a = report["report"]["sweep"][0]["contraction"]["a"].as_array().unwrap().clone();
    assert!(a[0].as_f64().unwrap() > 0.0);
    assert_eq!(a[1], 0.0);
}

#[test]
fn converge_sweeps_the_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "converge",
        "--config",
        config("dyadic.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--paths",
        "6",
        "--override",
        "converge.t0_values=[0.05, 0.1]",
        "--override",
        "converge.dt_values=[0.01, 0.005]",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&dir.path().join("report_converge.json"));
    assert_eq!(report["report"]["sweep"].as_array().unwrap().len(), 4);
    assert_eq!(report["report"]["sweep"][3]["window_steps"], 20);
}

#[test]
fn environment_names_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["simulate", "--config", config("decay.toml").to_str().unwrap()])
        .env("LEVY_GALERKIN_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("trajectory_0.csv").exists());
}

#[test]
fn shipped_noisy_configs_pass_every_suite() {
    for name in ["dyadic.toml", "nse.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["verify", "--config", config(name).to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        for suite in ["structure", "coefficients", "noise", "energy", "apriori"] {
            assert_eq!(json(&dir.path().join(format!("report_{suite}.json")))["pass"], true, "{name} {suite}");
        }
    }
}
