use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaincoord"));
    cmd.env_remove("CHAINCOORD_SEED_CONFIG_DIR");
    cmd
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> PathBuf {
    configs().join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_prints_results_table() {
    let out = run(bin().arg("solve").arg(config("problem1.json")));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for needle in [
        "Decentralized",
        "Centralized",
        "Coordinated",
        "803.393",
        "1007.782",
        "[1.88] = 2",
        "max oracle gap",
    ] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
}

#[test]
fn blocked_solve_reports_uplift() {
    let out = run(bin().args(["solve", "--blocked"]).arg(config("problem1.json")));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("without donation"));
    assert!(text.contains("601.806"));
    assert!(text.contains("uplift 2.98%"));
}

#[test]
fn missing_config_is_an_input_error() {
    let out = run(bin().args(["solve", "/no/such/dir/params.json"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/dir/params.json"));

    let out = run(bin().arg("solve"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(config("problem1.json")).unwrap();
    std::fs::write(&path, text.replace("\"k\": 0.6", "\"k\": 1.5")).unwrap();
    let out = run(bin().arg("solve").arg(&path));
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("k"));
}

#[test]
fn json_output_is_deterministic() {
    let a = run(bin().args(["solve", "--json"]).arg(config("problem2.json")));
    let b = run(bin().args(["solve", "--json"]).arg(config("problem2.json")));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let value: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let report = &value[0];
    assert_eq!(report["decentralized"]["n_star"], 1);
    assert!(report["coordinated"]["mu_bargain"].as_f64().unwrap() > 0.7);
}

#[test]
fn solve_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = run(bin().arg("solve").arg(config("problem1.json")).arg("--out").arg(&path));
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("803.393"));
}

#[test]
fn theta_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.csv");
    let out = run(bin()
        .args([
            "sweep", "--param", "theta", "--from", "0", "--to", "0.5", "--steps", "11", "--out",
        ])
        .arg(&path)
        .arg(config("problem1.json")));
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("theta,"));
    assert!(stdout(&out).contains("theta = 0.26"));
}

#[test]
fn two_point_sweep_goes_to_stdout() {
    let out = run(bin()
        .args(["sweep", "--param", "b", "--from", "0.1", "--to", "0.3", "--steps", "2"])
        .arg(config("problem1.json")));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("0.1,"));
}

#[test]
fn unknown_sweep_parameter_lists_valid_fields() {
    let out = run(bin()
        .args(["sweep", "--param", "gamma", "--from", "0", "--to", "1", "--steps", "3"])
        .arg(config("problem1.json")));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("gamma"));
    assert!(err.contains("theta") && err.contains("A_r"));
}

#[test]
fn verify_passes_on_problem1() {
    let out = run(bin().arg("verify").arg(config("problem1.json")));
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_warns_near_unit_elasticity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stiff.json");
    let text = std::fs::read_to_string(config("problem1.json")).unwrap();
    std::fs::write(&path, text.replace("\"b\": 0.1", "\"b\": 0.999999")).unwrap();
    let out = run(bin().args(["verify", "--json"]).arg(&path));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let warnings = value[0]["report"]["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("near-singular")));
}

#[test]
fn all_problems_uses_builtin_sets() {
    let out = run(bin().args(["solve", "--all-problems"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for i in 1..=5 {
        assert!(text.contains(&format!("== problem{i} ")));
    }
}

#[test]
fn all_problems_reads_seed_directory() {
    let dir = tempfile::tempdir().unwrap();
    for i in 1..=5 {
        let name = format!("problem{i}.json");
        let mut text = std::fs::read_to_string(config(&name)).unwrap();
        if i == 1 {
            text = text.replace("\"xi\": 0.4", "\"xi\": 0.5");
        }
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let out = run(bin()
        .args(["solve", "--all-problems", "--json"])
        .env("CHAINCOORD_SEED_CONFIG_DIR", dir.path()));
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 5);
    assert_eq!(value[0]["params"]["xi"], 0.5);

    let empty = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["solve", "--all-problems"])
        .env("CHAINCOORD_SEED_CONFIG_DIR", empty.path()));
    assert_eq!(out.status.code(), Some(2));
}
