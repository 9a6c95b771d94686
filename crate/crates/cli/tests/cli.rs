use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sgldiff::Constants;
use sgldiff_cli::output::RunManifest;

fn sgldiff(args: &[&str], dir: &Path, config: Option<&str>, threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sgldiff"));
    cmd.args(args).arg("--out").arg(dir).env_remove("SGLDIFF_THREADS");
    if let Some(text) = config {
        let path = dir.with_extension("toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    if let Some(n) = threads {
        cmd.env("SGLDIFF_THREADS", n.to_string());
    }
    cmd.output().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn digests(dir: &Path) -> BTreeMap<String, String> {
    manifest(dir).files.into_iter().map(|f| (f.path, f.sha256)).collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn constants_outputs_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("c");
    let o = sgldiff(&["constants"], &dir, None, None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&dir);
    let names: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(names, ["constants.json", "bounds.csv"]);
    m.verify(&dir).unwrap();
    assert_eq!(m.experiment, "constants");
    assert_eq!(m.config["family"]["R"], 0.1);

    let text = std::fs::read_to_string(dir.join("constants.json")).unwrap();
    let c: Constants = serde_json::from_str(&text).unwrap();
    assert!((c.c - 4.6386).abs() < 2e-4);
    assert!((c.big_c - 2.1558).abs() < 1e-4);
    assert!((c.c_phi - 0.008743).abs() < 1e-6);
    assert_eq!(serde_json::from_str::<Constants>(&serde_json::to_string(&c).unwrap()).unwrap(), c);

    let bounds = std::fs::read_to_string(dir.join("bounds.csv")).unwrap();
    assert!(bounds.starts_with("eta,t,theorem1_plain,theorem1_improved,theorem2,theorem3,combined\n"));
    assert_eq!(bounds.lines().count(), 1 + 5 * 4);
}

#[test]
fn constants_limit_case() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("c");
    let cfg = "[family]\nkind = \"quadratic\"\na = [1.0]\nb = [0.0]\nL = 0.0\nK = 1.0\nR = 0.01\n";
    let o = sgldiff(&["constants"], &dir, Some(cfg), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_json(&dir.join("constants.json"));
    assert!((c["c"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!((c["C"].as_f64().unwrap() - 2.0).abs() < 1e-2);
}

#[test]
fn short_figure1_run_is_not_mixed() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("f1");
    let o = sgldiff(&["figure1"], &dir, Some("horizon = 0.01\nburn_in = 0.0\nthin = 1\n"), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.join("fig1_summary.json"));
    assert_eq!(s["mixed"], false);
    assert!(s["w1_target"].as_f64().unwrap() > 0.1);
    let path = std::fs::read_to_string(dir.join("fig1_path.csv")).unwrap();
    assert!(path.lines().any(|l| l == "t,x_0,index"));
    assert!(path.lines().last().unwrap().ends_with(",-1"));
    let hist = std::fs::read_to_string(dir.join("fig1_hist.csv")).unwrap();
    assert_eq!(hist.lines().next().unwrap(), "bin_left,bin_right,bin_center,count,density");
    assert_eq!(hist.lines().count(), 81);
}

#[test]
fn figure2_components_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("f2");
    let o = sgldiff(&["figure2", "--eta", "1,0.01"], &dir, Some("horizon = 50.0\nburn_in = 5.0\n"), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["fig2_path_eta1e0.csv", "fig2_path_eta1e-2.csv", "fig2_hist.csv", "fig2_density.csv", "fig2_summary.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let comps = std::fs::read_to_string(dir.join("fig2_components.csv")).unwrap();
    let vars: Vec<f64> = comps.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(vars, [1.0 / 5.0, 1.0 / 15.0]);
    let dens = std::fs::read_to_string(dir.join("fig2_density.csv")).unwrap();
    assert_eq!(dens.lines().next().unwrap(), "x,target,component_0,component_1");
    let path = std::fs::read_to_string(dir.join("fig2_path_eta1e0.csv")).unwrap();
    assert!(path.lines().any(|l| l == "t,x_0,index"));
    let s = read_json(&dir.join("fig2_summary.json"));
    assert_eq!(s["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&str, &str); 4] = [
        ("figure2", "horizon = 20.0\nburn_in = 2.0\neta = [1.0, 0.1]\n"),
        ("strong_error", "n_replicas = 64\neta = [0.1, 0.01, 0.001]\n"),
        ("coupling", "n_replicas = 64\n"),
        ("ergodicity", "n_replicas = 500\nreference_horizon = 50.0\nreference_points = 500\nn_boot = 10\n"),
    ];
    for (cmd, cfg) in cases {
        let a = tmp.path().join(format!("{cmd}_1"));
        let b = tmp.path().join(format!("{cmd}_4"));
        let c = tmp.path().join(format!("{cmd}_1again"));
        for (dir, t) in [(&a, 1), (&b, 4), (&c, 1)] {
            let o = sgldiff(&[cmd, "--seed", "7"], dir, Some(cfg), Some(t));
            assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(digests(&a), digests(&b), "{cmd}");
        assert_eq!(digests(&a), digests(&c), "{cmd}");
        assert_ne!(digests(&a), BTreeMap::new());
    }
}

#[test]
fn strong_error_of_single_component_family_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("se");
    let cfg = "n_replicas = 20\n[family]\nkind = \"quadratic\"\na = [10.0]\nb = [0.0]\n";
    let o = sgldiff(&["strong_error"], &dir, Some(cfg), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.join("strong_error_summary.json"));
    for row in s["rows"].as_array().unwrap() {
        assert_eq!(row["estimate"], 0.0);
    }
}

#[test]
fn strong_error_needs_three_step_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sgldiff(&["strong_error", "--eta", "0.1,0.01"], &tmp.path().join("se"), None, None);
    assert_eq!(code(&o), 2);
}

#[test]
fn identical_starts_meet_at_time_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cp");
    let o = sgldiff(&["coupling"], &dir, Some("n_replicas = 20\nx0 = [1.5]\ny0 = [1.5]\n"), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.join("coupling_meeting_times.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    for r in rows {
        assert!(r.ends_with(",1,0.0000000000000000e0"), "{r}");
    }
}

#[test]
fn ergodicity_starts_at_distance_four() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("er");
    let cfg = "n_replicas = 2000\nreference_horizon = 2000.0\nreference_points = 4000\nn_boot = 20\ntimes = [0.0, 1.0]\n";
    let o = sgldiff(&["ergodicity"], &dir, Some(cfg), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.join("ergodicity_summary.json"));
    let w0 = s["per_eta"][0]["w0"].as_f64().unwrap();
    assert!((w0 - 4.0).abs() < 0.2, "{w0}");
    let csv = std::fs::read_to_string(dir.join("ergodicity.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eta,t,w1,stderr,bound,w1_debiased");
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    let dir = tmp.path().join("empty");
    let o = sgldiff(&["verify"], &dir, Some("checks = []\n"), None);
    assert_eq!(code(&o), 0);
    let v = read_json(&dir.join("verify.json"));
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"], Value::Array(vec![]));

    let dir = tmp.path().join("misdeclared");
    let cfg = "checks = [\"assumption1\"]\n[family]\nkind = \"quadratic\"\na = [5.0, 15.0]\nb = [5.0, -1.6666666666666667]\nL = 14.0\n";
    let o = sgldiff(&["verify"], &dir, Some(cfg), None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("assumption1"));
    let v = read_json(&dir.join("verify.json"));
    assert_eq!(v["passed"], false);
    assert!(dir.join("manifest.json").exists());

    let dir = tmp.path().join("appendix");
    let o = sgldiff(&["verify"], &dir, Some("checks = [\"dissipativeness\", \"appendix_c_plateau\"]\n"), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = sgldiff(&["verify"], &tmp.path().join("bad"), Some("checks = [\"lemma9\"]\n"), None);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_configuration_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        "bogus = 1\n",
        "dt = -1.0\n",
        "horizon = 5.0\nburn_in = 5.0\n",
        "experiment = \"figure2\"\n",
        "[family]\nkind = \"nope\"\n",
    ];
    for (k, cfg) in cases.iter().enumerate() {
        let o = sgldiff(&["figure1"], &tmp.path().join(format!("bad{k}")), Some(cfg), None);
        assert_eq!(code(&o), 2, "{cfg}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = sgldiff(&["figure1", "--eta", "0"], &tmp.path().join("eta"), None, None);
    assert_eq!(code(&o), 0, "figure1 ignores eta");
    let o = sgldiff(&["figure2", "--eta", "0"], &tmp.path().join("eta2"), None, None);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_config_file_is_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sgldiff"))
        .args(["constants", "--config"])
        .arg(tmp.path().join("absent.toml"))
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.toml"));
}

#[test]
fn kebab_case_aliases() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sgldiff(&["sweep-eta", "--eta", "1,0.1"], &tmp.path().join("s"), Some("horizon = 20.0\n"), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("s/sweep_eta.csv").exists());
}
