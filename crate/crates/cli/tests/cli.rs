use std::process::Command;

use focklab_cli::{CliError, ExitKind, RunConfig};

const MINIMAL: &str = r#"
experiment = "xia_bc"
weight = "classical"

[params]
p = [1, 2]
N = [250, 500, 1000]
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_focklab"));
    c.env_remove("FOCKLAB_OUT_DIR");
    c
}

fn invalid_key(err: CliError) -> String {
    match err {
        CliError::Invalid { key, .. } => key,
        other => panic!("expected an invalid-key error, got {other}"),
    }
}

#[test]
fn minimal_config_is_valid() {
    let rc = RunConfig::parse_str(MINIMAL, "minimal.toml").unwrap();
    let cfg = rc.experiment_config().unwrap();
    assert_eq!(cfg.p, vec![1.0, 2.0]);
    assert_eq!(cfg.n, vec![250, 500, 1000]);
}

#[test]
fn negative_r_names_the_key() {
    let text = format!("{MINIMAL}r = -1.0\n");
    let err = RunConfig::parse_str(&text, "bad.toml").unwrap_err();
    assert_eq!(err.kind(), ExitKind::Config);
    let msg = err.to_string();
    assert_eq!(invalid_key(err), "params.r", "{msg}");
}

#[test]
fn decreasing_schedule_is_rejected() {
    let text = MINIMAL.replace("N = [250, 500, 1000]", "N = [10, 5]");
    let err = RunConfig::parse_str(&text, "bad.toml").unwrap_err();
    assert_eq!(invalid_key(err), "params.N");
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let text = format!("{MINIMAL}tolerance = 3\n");
    let msg = RunConfig::parse_str(&text, "bad.toml").unwrap_err().to_string();
    assert!(msg.contains("tolerance") && msg.contains("line"), "{msg}");

    let msg = RunConfig::parse_str("experiment = \"xia_bc\"\nflavour = 1\n", "top.toml").unwrap_err().to_string();
    assert!(msg.contains("flavour"), "{msg}");
}

#[test]
fn nondeterministic_runs_are_rejected() {
    let text = MINIMAL.replace("weight = \"classical\"", "weight = \"classical\"\ndeterministic = false");
    assert_eq!(invalid_key(RunConfig::parse_str(&text, "x.toml").unwrap_err()), "deterministic");
}

#[test]
fn bad_weight_string_is_a_config_error() {
    let text = MINIMAL.replace("\"classical\"", "\"power:4\"");
    assert_eq!(invalid_key(RunConfig::parse_str(&text, "x.toml").unwrap_err()), "weight");
}

#[test]
fn rho_subcommand_prints_the_gaussian_value() {
    let out = bin().args(["rho", "--weight", "gaussian:0.5", "--z", "0,0"]).output().unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 0.3989423).abs() <= 1e-7, "{v}");
}

#[test]
fn lattice_subcommand_writes_a_verified_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out-dir", dir.path().to_str().unwrap(), "lattice", "--weight", "power:4:1", "--r", "0.5", "--rmax", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("lattice.csv")).unwrap();
    assert!(csv.starts_with("j,x,y,rho"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn config_errors_exit_2_with_json_on_stderr() {
    let out = bin().args(["rho", "--weight", "gaussian:-1", "--z", "0,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
}

#[test]
fn xia_bc_from_config_exits_0_with_svals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, MINIMAL).unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .env("FOCKLAB_OUT_DIR", &out_dir)
        .args(["experiment", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["svals_xia.csv", "svals_conj_xia.csv", "report.json"] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn every_subcommand_has_help() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["rho", "doubling", "lattice", "partition", "g2", "mo2", "ida", "imo", "decompose", "basis", "kernel", "hankel", "toeplitz", "experiment"] {
        assert!(text.lines().any(|l| l.trim_start().starts_with(sub)), "{sub} missing from --help");
        let sub_help = bin().args([sub, "--help"]).output().unwrap();
        assert!(sub_help.status.success(), "{sub} --help failed");
    }
}
