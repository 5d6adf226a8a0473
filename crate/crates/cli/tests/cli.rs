use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sqg_core::manifest::sha256_hex;
use tempfile::TempDir;

fn sqg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqg"))
        .args(args)
        .env("SQG_OUT_DIR", dir)
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn sqg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, format!("version = 1\n{body}")).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

const SMALL: &str = "seed = 5\n[solver]\ngrid = 32\ndt = 0.01\nt_final = 0.05\noutput_every = 1\n";

#[test]
fn simulate_valid_config_writes_series_and_manifest() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("out");
    let o = sqg(&out, &["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(csv.lines().count() >= 6, "{csv}");
    assert!(out.join("steps.csv").exists());
    assert!(out.join("final_state.sqgf").exists());
    let m = json(&out.join("simulate.manifest.json"));
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["solver"]["grid"], 32);
    let listed: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["path"].as_str().unwrap())
        .collect();
    assert_eq!(listed, ["series.csv", "steps.csv", "final_state.sqgf"]);
    for o in m["outputs"].as_array().unwrap() {
        let bytes = fs::read(out.join(o["path"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
}

#[test]
fn gamma_out_of_range_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let o = sqg(d.path(), &["simulate", "--gamma", "3", "--grid", "32"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("(0,2]"), "{}", stderr(&o));
    assert!(!d.path().join("simulate.manifest.json").exists());
}

#[test]
fn bad_config_file_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "[solver]\nbogus = 1\n");
    let o = sqg(d.path(), &["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn gevrey_overflow_is_a_guard_abort() {
    let d = TempDir::new().unwrap();
    let o = sqg(
        d.path(),
        &["simulate", "--grid", "64", "--gamma", "2", "--t-final", "10"],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("gevrey_horizon"), "{}", stderr(&o));
}

#[test]
fn cfl_abort_flushes_the_partial_series() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "[solver]\ngrid = 32\ndt = 0.1\nt_final = 1.0\n[initial]\nkind = \"mode\"\nm1 = 1\nm2 = 1\namplitude = 1000.0\n",
    );
    let out = d.path().join("out");
    let o = sqg(&out, &["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("cfl"), "{}", stderr(&o));
    assert!(out.join("series.csv").exists());
    let m = json(&out.join("simulate.manifest.json"));
    let notes = m["notes"].as_array().unwrap();
    assert!(
        notes.iter().any(|n| n.as_str().unwrap().starts_with("aborted")),
        "{notes:?}"
    );
}

#[test]
fn reruns_are_byte_identical() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert_eq!(code(&sqg(&a, &["simulate", "--config", &cfg])), 0);
    assert_eq!(code(&sqg(&b, &["simulate", "--config", &cfg])), 0);
    for f in ["series.csv", "steps.csv", "final_state.sqgf"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (ma, mb) = (
        json(&a.join("simulate.manifest.json")),
        json(&b.join("simulate.manifest.json")),
    );
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["config"], mb["config"]);
}

#[test]
fn flags_override_the_file() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("out");
    let o = sqg(
        &out,
        &[
            "simulate",
            "--config",
            &cfg,
            "--seed",
            "11",
            "--gamma",
            "0.9",
            "--integrator",
            "etd_rk2",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = json(&out.join("simulate.manifest.json"));
    assert_eq!(m["seed"], 11);
    assert_eq!(m["config"]["solver"]["gamma"], 0.9);
    assert_eq!(m["config"]["solver"]["integrator"], "etd_rk2");
    assert_eq!(m["config"]["solver"]["dt"], 0.01);
}

#[test]
fn out_dir_flag_beats_environment() {
    let d = TempDir::new().unwrap();
    let flag = d.path().join("flag");
    let o = sqg(
        &d.path().join("env"),
        &["verify", "phase_lower_bound", "--out-dir", flag.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(flag.join("phase_lower_bound.json").exists());
    assert!(!d.path().join("env").exists());
}

#[test]
fn norms_of_a_stored_state() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "[solver]\ngrid = 32\nt_final = 0.01\ndt = 0.01\nnu = 0.0\n[initial]\nkind = \"mode\"\nm1 = 1\n",
    );
    assert_eq!(code(&sqg(d.path(), &["simulate", "--config", &cfg])), 0);
    let o = sqg(
        d.path(),
        &["norms", d.path().join("final_state.sqgf").to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // cos(x₁) is a steady inviscid state
    let pi = std::f64::consts::PI;
    assert!((v["l2"].as_f64().unwrap() - pi * 2f64.sqrt()).abs() < 1e-12, "{v}");
    assert!((v["linf"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{v}");
    assert!((v["l1"].as_f64().unwrap() - 8.0 * pi).abs() < 0.01 * 8.0 * pi, "{v}");
    assert_eq!(json(&d.path().join("norms.json")), v);
    let o = sqg(
        d.path(),
        &[
            "norms",
            "--grid",
            "64",
            d.path().join("final_state.sqgf").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_coercivity_q4_gamma1_passes() {
    let d = TempDir::new().unwrap();
    let o = sqg(
        d.path(),
        &["verify", "coercivity_q", "--q", "4", "--gamma", "1", "--samples", "16"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&d.path().join("coercivity_q.json"));
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["lemma_id"], "coercivity_q");
    assert!(d.path().join("verify_coercivity_q.manifest.json").exists());
}

#[test]
fn verify_counterexample_gamma2_passes() {
    let d = TempDir::new().unwrap();
    let o = sqg(d.path(), &["verify", "counterexample_gamma2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&d.path().join("counterexample_gamma2.json"))["verdict"], "pass");
}

#[test]
fn verify_phase_gamma1_detects_degeneracy() {
    let d = TempDir::new().unwrap();
    let o = sqg(d.path(), &["verify", "phase_lower_bound", "--gamma", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&d.path().join("phase_lower_bound.json"));
    assert_eq!(r["verdict"], "pass");
    assert!(r["measured_constant"].as_f64().unwrap() <= 1e-3, "{r}");
}

#[test]
fn verify_unknown_lemma_is_a_usage_error() {
    let d = TempDir::new().unwrap();
    let o = sqg(d.path(), &["verify", "no_such_lemma"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("heat_decay"), "{}", stderr(&o));
}

#[test]
fn verify_reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    let args = ["verify", "ab_pointwise", "--q", "3", "--seed", "4"];
    assert_eq!(code(&sqg(&a, &args)), 0);
    assert_eq!(code(&sqg(&b, &args)), 0);
    assert_eq!(
        fs::read(a.join("ab_pointwise.json")).unwrap(),
        fs::read(b.join("ab_pointwise.json")).unwrap()
    );
}

fn trace_rows(path: &Path, kind: &str) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| l.starts_with(kind))
        .map(|l| l.split(',').skip(2).map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn galerkin_single_mode_has_zero_differences() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "[solver]\ngrid = 64\ndt = 0.01\nt_final = 0.1\n[initial]\nkind = \"mode\"\nm1 = 1\nm2 = 0\n[iterate]\nns = [2, 3, 4]\n",
    );
    let o = sqg(d.path(), &["iterate", "galerkin", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = d.path().join("galerkin_trace.csv");
    let scale = trace_rows(&path, "iterate")[0][0];
    let diffs = trace_rows(&path, "difference");
    assert_eq!(diffs.len(), 2);
    // zero up to round-off of the transforms
    for row in diffs {
        assert!(row.iter().all(|&x| x <= 1e-14 * scale), "{row:?}");
    }
    assert!(d.path().join("iterate_galerkin.manifest.json").exists());
}

#[test]
fn picard_first_row_is_the_linear_flow() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "[solver]\ngrid = 64\ndt = 0.01\nt_final = 0.1\n[initial]\nkind = \"mode\"\nm1 = 1\nm2 = 0\n[iterate]\nns = [0, 1]\n",
    );
    let o = sqg(d.path(), &["iterate", "picard", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = trace_rows(&d.path().join("picard_trace.csv"), "iterate");
    // θ⁽¹⁾ = e^{-tD^γ}cos x₁, whose sup_t L² norm is attained at t = 0
    let l2 = std::f64::consts::PI * 2f64.sqrt();
    assert!((rows[0][0] - l2).abs() < 1e-12 * l2, "{rows:?}");
    let rate = json(&d.path().join("picard_rate.json"));
    assert_eq!(rate["scheme"], "picard");
}

#[test]
fn galerkin_random_data_fits_a_rate() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "seed = 2\n[solver]\ngrid = 64\ndt = 0.005\nt_final = 0.05\n[initial]\nkind = \"power_law\"\nslope = 2.0\nnormalize = 1.5\n",
    );
    let o = sqg(d.path(), &["iterate", "galerkin", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rate = json(&d.path().join("galerkin_rate.json"));
    assert!(rate["slope"].as_f64().unwrap() < 0.0, "{rate}");
    assert_eq!(rate["slope"], rate["rate"]["slope"]);
    assert!(rate["ns"].as_array().unwrap().len() >= 3, "{rate}");
}

#[test]
fn help_exits_zero_and_bad_flags_exit_one() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&sqg(d.path(), &["--help"])), 0);
    assert_eq!(code(&sqg(d.path(), &["simulate", "--no-such-flag"])), 1);
}
