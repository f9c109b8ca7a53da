use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ctxscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxscope"))
        .args(args)
        .env_remove("CTXSCOPE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ctxscope(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn approx(v: &Value, want: f64, tol: f64) {
    let got = v.as_f64().unwrap_or_else(|| panic!("{v} is not a number"));
    assert!((got - want).abs() <= tol, "{got} vs {want}");
}

#[test]
fn witness_of_named_states() {
    let nf = stdout(&["witness", "--state", "Nf"]);
    assert!(nf.contains("+0.1111") && nf.contains("+0.2593"), "{nf}");

    let bf = json(&["witness", "--state", "Bf", "--format", "json"]);
    approx(&bf["witness_direct"], -0.0392, 5e-5);
    approx(&bf["gain"], 0.1242, 5e-5);

    let b1 = json(&["witness", "--state", "basis1", "--format", "json"]);
    approx(&b1["witness_direct"], -1.0 / 6.0, 1e-12);
    approx(&b1["witness_from_outputs"], -1.0 / 6.0, 1e-12);
}

#[test]
fn json_keys_are_sorted() {
    let text = stdout(&["witness", "--state", "V0", "--format", "json"]);
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&"witness_direct"));
}

#[test]
fn explicit_state_is_normalized_on_load() {
    let v = json(&["witness", "--state", "4,0,4,0,2,0", "--format", "json"]);
    approx(&v["witness_direct"], 2.0 / 9.0, 1e-12);
}

#[test]
fn phase_scan_peak_at_pi() {
    let text = stdout(&["phase-scan", "--state", "Nf", "--from", "0", "--to", "6.283185307179586", "--steps", "13"]);
    assert!(text.starts_with("setting,p1,p2,p3,survival\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 13);
    let pi = &rows[6];
    assert!((pi[0] - std::f64::consts::PI).abs() < 1e-9);
    assert!(text.contains(",0.925925926,"));
    assert!((pi[3] - 25.0 / 27.0).abs() < 1e-9);
}

#[test]
fn transmittance_scan_at_zero_matches_block() {
    let rows = csv_rows(&stdout(&["trans-scan", "--state", "Nf", "--steps", "5"]));
    let block = json(&["run", "--state", "Nf", "--block", "f", "--format", "json"]);
    let d = &block["distribution"];
    for (k, key) in ["p1", "p2", "p3"].iter().enumerate() {
        approx(&d[key], rows[0][k + 1], 1e-9);
    }
    assert!((rows[0][1] - 0.1481).abs() < 5e-5 && (rows[0][3] - 0.5926).abs() < 5e-5);
    let last = rows.last().unwrap();
    assert!((last[4] - 1.0).abs() < 1e-9);
}

#[test]
fn seeded_output_is_byte_identical() {
    let args = ["phase-scan", "--state", "V0", "--noise", "0.9", "--seed", "42"];
    let a = ctxscope(&args);
    let b = ctxscope(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ctxscope(&["phase-scan", "--state", "V0", "--noise", "0.9", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_flag_overrides_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ctxscope"));
        cmd.args(["sample", "--state", "Nf"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        match env {
            Some(e) => cmd.env("CTXSCOPE_SEED", e),
            None => cmd.env_remove("CTXSCOPE_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
    assert_eq!(run(Some("9"), Some("5")), run(None, Some("5")));
    assert_ne!(run(Some("9"), None), run(None, Some("5")));
}

#[test]
fn scan_fit_pipeline_recovers_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let p = path.to_str().unwrap();
    stdout(&["phase-scan", "--state", "Bf", "--noise", "1.0", "--seed", "11", "--out", p]);
    let fit = json(&["fit", "--input", p, "--model", "Bf"]);
    for v in fit["visibilities"].as_array().unwrap() {
        let v = v.as_f64().unwrap();
        assert!((0.97..=1.03).contains(&v), "{v}");
    }
}

fn write_noiseless_counts(dir: &Path, state: &str) -> String {
    let ideal = stdout(&["phase-scan", "--state", state]);
    let mut text = String::from("setting,n1,n2,n3,duration\n");
    for r in csv_rows(&ideal) {
        text.push_str(&format!(
            "{:.9},{:.0},{:.0},{:.0},1\n",
            r[0],
            (r[1] * 1e6).round(),
            (r[2] * 1e6).round(),
            (r[3] * 1e6).round()
        ));
    }
    let path = dir.join(format!("{state}.csv"));
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn noiseless_counts_fit_unit_visibility() {
    let dir = tempfile::tempdir().unwrap();
    for state in ["Nf", "Bf", "V0"] {
        let p = write_noiseless_counts(dir.path(), state);
        let fit = json(&["fit", "--input", &p, "--model", state]);
        for v in fit["visibilities"].as_array().unwrap() {
            approx(v, 1.0, 1e-6);
        }
    }
}

#[test]
fn v0_model_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_noiseless_counts(dir.path(), "V0");
    let fit = json(&["fit", "--input", &p, "--model", "V0"]);
    let m = &fit["model"];
    for (k, (a, b)) in [(2.0 / 9.0, 2.0 / 9.0), (2.0 / 9.0, 2.0 / 9.0), (5.0 / 9.0, 4.0 / 9.0)].iter().enumerate() {
        approx(&m["offset"][k], *a, 1e-12);
        approx(&Value::from(m["cosine"][k].as_f64().unwrap().abs()), *b, 1e-12);
    }
}

#[test]
fn check_passes_on_canonical_basis() {
    let out = ctxscope(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().ends_with("all checks passed"));
    assert!(text.contains("output witness identity (10000 states)"));
}

#[test]
fn perturbed_basis_fails_orthogonality() {
    let out = ctxscope(&["check", "--perturb-basis", "S2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("check failed: orthogonality"), "{err}");
}

#[test]
fn reproduce_rows() {
    let rep = json(&["reproduce", "--format", "json"]);
    let states = rep["states"].as_array().unwrap();
    let by_name = |n: &str| states.iter().find(|s| s["state"] == n).unwrap();

    let nf = by_name("Nf");
    let max_blocked = nf["blocked"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["deviation"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(max_blocked <= 0.015, "{max_blocked}");
    approx(&nf["blocked"][0]["ideal"], 4.0 / 27.0, 1e-12);

    let v0 = by_name("V0");
    approx(&v0["witness"]["ideal"], 2.0 / 9.0, 1e-12);
    assert!(v0["witness"]["deviation"].as_f64().unwrap() <= 0.01);

    let bf = by_name("Bf");
    approx(&bf["witness"]["ideal"], -2.0 / 51.0, 1e-12);
    assert!(bf["witness"]["deviation"].as_f64().unwrap() <= 0.002);

    let text = stdout(&["reproduce"]);
    for s in ["== Nf ==", "== Bf ==", "== V0 =="] {
        assert!(text.contains(s));
    }
}

#[test]
fn schema_and_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "phi,a,b\n0,1,2\n").unwrap();
    let out = ctxscope(&["fit", "--input", bad.to_str().unwrap(), "--model", "Nf"]);
    assert_eq!(out.status.code(), Some(2));

    let ideal = dir.path().join("ideal.csv");
    std::fs::write(&ideal, stdout(&["phase-scan", "--state", "Nf"])).unwrap();
    let out = ctxscope(&["fit", "--input", ideal.to_str().unwrap(), "--model", "Nf"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(ctxscope(&["witness", "--state", "nope"]).status.code(), Some(2));
    assert_eq!(ctxscope(&["run", "--state", "Nf", "--block", "in1"]).status.code(), Some(2));
    assert_eq!(ctxscope(&["run", "--state", "Nf", "--attenuate", "f=1.5"]).status.code(), Some(2));
    assert_eq!(ctxscope(&["phase-scan", "--state", "Nf", "--steps", "0"]).status.code(), Some(2));
}

#[test]
fn degenerate_design_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.csv");
    std::fs::write(&p, "setting,n1,n2,n3,duration\n0,10,10,40,1\n3.141592654,1,1,70,1\n").unwrap();
    let out = ctxscope(&["fit", "--input", p.to_str().unwrap(), "--model", "Nf"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_footer_and_rows() {
    let text = stdout(&["sweep", "--resolution", "41"]);
    assert!(text.starts_with("alpha,beta,witness,gain,p_f,p_d1,p_d2\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41 * 41);
    for r in &rows {
        assert!(r[2] <= r[3] + 1e-9, "{r:?}");
    }
    let footer = text.lines().last().unwrap();
    let max: f64 = footer.split_whitespace().nth(3).unwrap().parse().unwrap();
    let exact = (33f64.sqrt() - 3.0) / 12.0;
    let h = std::f64::consts::FRAC_PI_2 / 40.0;
    assert!(max <= exact + 1e-12 && exact - max <= 2.0 * h, "{footer}");

    let bf = rows
        .iter()
        .filter(|r| r[3] > 0.0 && r[2] < 0.0)
        .count();
    assert!(bf > 0);
}

#[test]
fn complex_sweep_is_seeded_and_bounded() {
    let a = stdout(&["sweep", "--complex", "--samples", "200", "--seed", "4"]);
    let b = stdout(&["sweep", "--complex", "--samples", "200", "--seed", "4"]);
    assert_eq!(a, b);
    let rows = csv_rows(&a);
    assert_eq!(rows.len(), 200);
    for r in rows {
        assert!(r[7] <= r[8] + 1e-9);
    }
}

#[test]
fn output_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.json");
    stdout(&["witness", "--state", "Nf", "--format", "json", "--out", p.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), stdout(&["witness", "--state", "Nf", "--format", "json"]));
}
