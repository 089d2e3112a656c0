use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lopsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lopsim")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn csv_matrix(text: &str, n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (r, c): (usize, usize) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0);
        m[r - 1][c - 1] = cols[2].parse().unwrap();
    }
    m
}

#[test]
fn verify_cz_reports_success_probability() {
    let out = lopsim(&["verify", "--gate", "cz", "--deterministic"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!((f(&r["p_succ"]["min"]) - 0.15241).abs() < 1e-3);
    assert!(f(&r["min_fidelity"]) > 1.0 - 1e-9);
    assert_eq!(r["truth_table"].as_array().unwrap().len(), 4);
    assert_eq!(r["config"]["seed"], 42);
    assert!(r["passed"].as_bool().unwrap());
}

#[test]
fn verify_printed_settings_use_loose_fidelity() {
    let out = lopsim(&["verify", "--gate", "cnot", "--settings", "printed", "--trials", "30", "--deterministic"]);
    assert_eq!(code(&out), 0);
    assert!(f(&json(&out)["min_fidelity"]) > 1.0 - 1e-4);
}

#[test]
fn verify_toffoli_reck() {
    let out = lopsim(&["verify", "--gate", "toffoli", "--scheme", "reck", "--trials", "20", "--deterministic"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!((f(&r["p_succ"]["max"]) - 0.02665).abs() < 1e-3);
    let rows = r["truth_table"].as_array().unwrap();
    assert_eq!(rows[6]["output"], "111");
    assert_eq!(rows[7]["output"], "110");
}

#[test]
fn verify_fails_with_exit_two_when_checks_fail() {
    // printed settings cannot reach 1e-12 fidelity
    let out = lopsim(&["verify", "--gate", "cz", "--settings", "printed", "--tol", "1e-12", "--trials", "10"]);
    assert_eq!(code(&out), 2);
    assert!(!json(&out)["passed"].as_bool().unwrap());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lopsim(&["verify", "--gate", "cz", "--trials", "0"])), 1);
    assert_eq!(code(&lopsim(&["cascade"])), 1);
    assert_eq!(code(&lopsim(&["verify", "--gate", "swap"])), 1);
    assert_eq!(code(&lopsim(&["solve", "--problem", "cz", "--starts", "0"])), 1);
    assert_eq!(code(&lopsim(&["--help"])), 0);
}

#[test]
fn deterministic_reports_are_byte_identical() {
    let args = ["verify", "--gate", "ccz", "--trials", "10", "--seed", "7", "--deterministic"];
    let (a, b) = (lopsim(&args), lopsim(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["config"].get("timestamp").is_none());
    let stamped = json(&lopsim(&["verify", "--gate", "cz", "--trials", "1"]));
    assert!(stamped["config"]["timestamp"].is_u64());
}

#[test]
fn solve_cz_recovers_known_class() {
    let out = lopsim(&["solve", "--problem", "cz", "--starts", "200", "--deterministic"]);
    assert_eq!(code(&out), 0);
    let best = &json(&out)["solutions"][0];
    let t: Vec<f64> = best["t"].as_array().unwrap().iter().map(f).collect();
    for (a, b) in t.iter().zip([0.3686, -0.2192, 0.8686]) {
        assert!((a - b).abs() < 1e-4, "{t:?}");
    }
    assert!(f(&best["residual_norm"]) < 1e-10);
    assert!((f(&best["amplitude"]).abs() - 0.3904).abs() < 1e-4);
}

#[test]
fn solve_tower_four() {
    let out = lopsim(&["solve", "--problem", "tower", "--k", "4", "--starts", "60", "--deterministic"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["k"], 4);
    assert!((f(&r["solutions"][0]["amplitude"]).abs() - 0.2664).abs() < 1e-3);
}

#[test]
fn solve_ccz_from_seed_file() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    fs::write(&seed, r#"{"t": [-0.7893, -0.9428, -0.3809, -0.3284, -0.2583, 0.8719, 0.03792, 0.3689, 0.7943, 0.8559]}"#)
        .unwrap();
    let out = lopsim(&["solve", "--problem", "ccz", "--starts", "0", "--seed-file", seed.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let best = &json(&out)["solutions"][0];
    assert!(f(&best["residual_norm"]) < 1e-10);
    assert!((f(&best["amplitude"]).abs() - 0.163231).abs() < 1e-4);
}

#[test]
fn solve_without_solutions_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    fs::write(&seed, "[1.0, 1.0, 1.0]").unwrap();
    let out = lopsim(&["solve", "--problem", "cz", "--starts", "0", "--seed-file", seed.to_str().unwrap(), "--tol", "1e-300"]);
    assert_eq!(code(&out), 3);
    assert!(!json(&out)["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn cascades() {
    let out = lopsim(&["cascade", "--gate", "cz", "--deterministic"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[7]["expected_sign"], 1.0);
    assert_eq!(rows[6]["expected_sign"], -1.0);

    let out = lopsim(&["cascade", "--gate", "ccz", "--scheme", "reck", "--settings", "printed", "--deterministic"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["rows"].as_array().unwrap().len(), 32);
    assert!((f(&r["magnitude_min"]) - 0.026644).abs() < 1e-3);

    let refused = lopsim(&["cascade", "--gate", "cz", "--on", "0,1", "0,1"]);
    assert_eq!(code(&refused), 1);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("share 2 qubits"));
}

#[test]
fn export_cz_matrix_matches_golden() {
    let out = lopsim(&["export", "--gate", "cz", "--format", "matrix_csv"]);
    assert_eq!(code(&out), 0);
    let m = csv_matrix(&String::from_utf8(out.stdout).unwrap(), 5);
    let golden = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.2192, 0.8475, 0.0, 0.4834],
        [0.0, 0.3597, 0.3904, 0.0, -0.8475],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.9070, -0.3597, 0.0, 0.2192],
    ];
    for r in 0..5 {
        for c in 0..5 {
            assert!((m[r][c] - golden[r][c]).abs() < 1e-3, "({r},{c}) {} vs {}", m[r][c], golden[r][c]);
        }
    }
}

#[test]
fn export_ccz_schemes_agree() {
    let get = |scheme: &str| {
        let out = lopsim(&["export", "--gate", "ccz", "--scheme", scheme, "--format", "matrix_csv"]);
        csv_matrix(&String::from_utf8(out.stdout).unwrap(), 8)
    };
    let (c, r) = (get("clements"), get("reck"));
    for i in 0..8 {
        for j in 0..8 {
            assert!((c[i][j] - r[i][j]).abs() < 1e-10);
        }
    }
    let spec = json(&lopsim(&["export", "--gate", "ccz", "--settings", "printed"]));
    let elements = spec["elements"].as_array().unwrap();
    let mzis: Vec<f64> = elements.iter().filter(|e| e["kind"] == "mzi").map(|e| f(&e["t"])).collect();
    assert_eq!(mzis, vec![-0.7893, -0.9428, -0.3809, -0.3284, -0.2583, 0.8719, 0.03792, 0.3689, 0.7943, 0.8559]);
    assert_eq!(elements.iter().filter(|e| e["kind"] == "swap").count(), 6);
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_small_networks() {
    let dir = tempfile::tempdir().unwrap();
    let identity = write(dir.path(), "id.json", r#"{"modes": 2, "elements": []}"#);
    let out = lopsim(&["simulate", "--network", &identity, "--input", "1,0"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.ends_with(",0")).collect();
    assert_eq!(rows, vec!["1 0,1,0,1"]);

    let bs = write(dir.path(), "bs.json", r#"{"modes": 2, "elements": [{"kind": "mzi", "modes": [1, 2], "t": 0.7071067811865476, "phi": 0.0}]}"#);
    let text = String::from_utf8(lopsim(&["simulate", "--network", &bs, "--input", "1,1"]).stdout).unwrap();
    let coincidence = text.lines().find(|l| l.starts_with("1 1,")).unwrap();
    let p: f64 = coincidence.rsplit(',').next().unwrap().parse().unwrap();
    assert!(p < 1e-24);
}

#[test]
fn simulate_cz_postselected() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("cz.json");
    let out = lopsim(&["export", "--gate", "cz", "--out", net.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // atomic write leaves no temp files behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let out = lopsim(&["simulate", "--network", net.to_str().unwrap(), "--qubits", "11", "--postselect"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("11,")).unwrap();
    let re: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((re + 0.3904).abs() < 1e-3);
}

#[test]
fn calibrate_rules() {
    let r = json(&lopsim(&["calibrate", "--t", "0.7071067811865476", "--theta2", "0.3"]));
    assert!((f(&r["theta1"]) - (0.3 + std::f64::consts::FRAC_PI_2)).abs() < 1e-12);
    let r = json(&lopsim(&["calibrate", "--t", "0"]));
    assert_eq!(f(&r["target_theta"]), 0.0);
    assert_eq!(f(&r["drive"]), 0.0);
    let r = json(&lopsim(&["calibrate", "--t", "-0.5", "--arm", "lower"]));
    assert!((f(&r["realised_t"]) + 0.5).abs() < 1e-12);
    assert_eq!(code(&lopsim(&["calibrate", "--t", "1.5"])), 1);
}
