use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn tool(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nhpp-sinr"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

/// Exit code and the parsed single stderr line.
fn failure(out: &Output) -> (i32, serde_json::Value) {
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {err}");
    (out.status.code().unwrap(), serde_json::from_str(lines[0]).expect("stderr is JSON"))
}

const LINK: &str = r#""link": {"alpha": 4, "sigma2": 1e-12, "r_t": 10, "antennas": 4}"#;

#[test]
fn eps_at_alpha_minus_two_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"model": {{"family": "power_law", "rho": 0.01, "eps": 2}}, {LINK}, "gamma_grid": [1, 10], "output_path": "x.csv"}}"#),
    );
    let (code, err) = failure(&tool(&["cdf", "--config", &cfg], None));
    assert_eq!(code, 1);
    assert_eq!(err["error"], "validation");
    assert!(err["message"].as_str().unwrap().contains("eps < alpha - 2"), "{err}");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn unordered_piecewise_radii_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(
            r#"{{"model": {{"family": "piecewise_power_law", "segments": [
                {{"rho": 0.01, "eps": 0, "outer_radius": 100}},
                {{"rho": 0.01, "eps": -1, "outer_radius": 50}},
                {{"rho": 0.01, "eps": -1}}]}},
              {LINK}, "gamma_grid": [1, 10], "output_path": "x.csv"}}"#
        ),
    );
    let (code, err) = failure(&tool(&["cdf", "--config", &cfg], None));
    assert_eq!(code, 1);
    assert!(err["message"].as_str().unwrap().starts_with("model:"), "{err}");
}

#[test]
fn unknown_key_names_key_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!("{{\n  {LINK},\n  \"gamma_grid\": [1],\n  \"trails\": 5\n}}"),
    );
    let (code, err) = failure(&tool(&["cdf", "--config", &cfg, "--out", "x.csv"], None));
    assert_eq!(code, 1);
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains("`trails`") && msg.contains("line 4"), "{msg}");
}

#[test]
fn quadrature_budget_exhaustion_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"model": {"family": "gaussian_cluster", "rho": 1, "v": 500},
            "link": {"alpha": 3, "sigma2": 1e-14, "r_t": 20, "antennas": 4},
            "gamma_grid": [1e5, 1e6],
            "quadrature": {"rel_tol": 1e-15, "abs_tol": 0, "max_subdivisions": 1}}"#,
    );
    let out = dir.path().join("x.csv");
    let (code, err) = failure(&tool(&["cdf", "--config", &cfg, "--out", out.to_str().unwrap()], None));
    assert_eq!(code, 2);
    assert_eq!(err["error"], "numerical");
}

#[test]
fn bad_arguments_and_missing_files_exit_one() {
    let (code, err) = failure(&tool(&["histogram", "--config", "x.json"], None));
    assert_eq!((code, err["error"].as_str().unwrap()), (1, "validation"));
    let (code, err) = failure(&tool(&["cdf", "--config", "/nonexistent/x.json"], None));
    assert_eq!((code, err["error"].as_str().unwrap()), (1, "io"));
}

fn run_cdf(dir: &Path, name: &str, seed: &str, threads: usize) -> Vec<u8> {
    let cfg = configs().join("power_law_pdf.json");
    let out = dir.join(name);
    let o = tool(
        &["cdf", "--config", cfg.to_str().unwrap(), "--seed", seed, "--trials", "3000", "--out", out.to_str().unwrap()],
        Some(threads),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn same_seed_gives_identical_bytes_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_cdf(dir.path(), "a.csv", "11", 1);
    let b = run_cdf(dir.path(), "b.csv", "11", 4);
    let c = run_cdf(dir.path(), "c.csv", "12", 4);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let header = String::from_utf8(a).unwrap();
    assert!(header.starts_with("gamma,sinr,sinr_db,analytic_cdf,empirical_cdf\n"));
}

#[test]
fn sidecar_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("power_law_simulate.json");
    let first = dir.path().join("first.csv");
    let o = tool(
        &["simulate", "--config", cfg.to_str().unwrap(), "--trials", "2000", "--seed", "5", "--out", first.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("first.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["trials"], 2000);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    let r_sim = meta["r_sim"].as_f64().unwrap();
    assert_eq!(meta["config"]["sim"]["truncation_radius"].as_f64().unwrap(), r_sim);

    let replay = write(dir.path(), "replay.json", &meta["config"].to_string());
    let second = dir.path().join("second.csv");
    let o = tool(&["simulate", "--config", &replay, "--out", second.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let ks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("second.csv.ks.json")).unwrap()).unwrap();
    assert!(ks["passes"].as_bool().unwrap(), "{ks}");
}
