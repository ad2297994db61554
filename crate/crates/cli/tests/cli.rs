use std::path::Path;
use std::process::{Command, Output};

use gravmetro::metrology::{printed_bound_rs, SchemeSpec};
use gravmetro::{ObserverPair, SchwarzschildGeometry};
use serde_json::{json, Value};

fn gravmetro(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gravmetro"));
    cmd.args(args).env_remove("GRAVMETRO_SCENARIO_DIR");
    if let Some(d) = env_dir {
        cmd.env("GRAVMETRO_SCENARIO_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let mut all = vec!["--no-timestamp", "--format", "json"];
    all.extend_from_slice(args);
    let out = gravmetro(&all, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn base_scenario() -> Value {
    json!({
        "schema_version": 1,
        "geometry": {"mass": 5.972e24},
        "r_a": 6.371e6,
        "r_b": 4.237e7,
        "packet": {"preset": "state-of-the-art-400THz"},
        "scheme": {"kind": "single_mode_squeezed", "r": 1.5},
        "N": 1e10,
        "seed": 42
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.display().to_string()
}

fn values(doc: &Value, col: &str) -> Vec<f64> {
    doc["rows"].as_array().unwrap().iter().map(|r| r[col].as_f64().unwrap()).collect()
}

fn row<'a>(doc: &'a Value, col: &str, name: &str) -> &'a Value {
    doc["rows"].as_array().unwrap().iter().find(|r| r[col] == name).unwrap_or_else(|| panic!("no row {name}"))
}

#[test]
fn flat_space_has_unit_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = base_scenario();
    s["geometry"] = json!({"r_s": 0.0});
    let path = write(dir.path(), "flat.json", &s);
    let doc = ok_json(&["--scenario", &path, "redshift"]);
    for q in ["f(r_A)", "f(r_B)", "Omega_B/Omega_A", "tau_B/tau_A"] {
        assert_eq!(row(&doc, "quantity", q)["value"], json!(1.0));
    }
    assert_eq!(row(&doc, "quantity", "delta_exact")["value"], json!(0.0));
}

#[test]
fn redshift_csv_matches_library_bit_for_bit() {
    let out = gravmetro(&["--no-timestamp", "--format", "csv", "redshift"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value,formula"));
    let parsed: Vec<(String, f64)> = lines
        .map(|l| {
            let mut f = l.splitn(3, ',');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let g = SchwarzschildGeometry::earth();
    let p = ObserverPair::new(6.371e6, 4.237e7).unwrap();
    let get = |q: &str| parsed.iter().find(|(n, _)| n == q).unwrap().1;
    assert_eq!(get("f(r_A)").to_bits(), g.metric_function(p.r_a).unwrap().to_bits());
    assert_eq!(get("Omega_B/Omega_A").to_bits(), g.redshift_ratio(&p).unwrap().to_bits());
    assert_eq!(get("delta_exact").to_bits(), g.delta_exact(&p).unwrap().to_bits());
    assert_eq!(get("tau_B/tau_A").to_bits(), g.proper_time_ratio(&p).unwrap().to_bits());
    assert!(get("delta_exact") < 0.0);
}

#[test]
fn bounds_near_quoted_values() {
    let within = |v: f64, t: f64| v / t <= 1.5 && t / v <= 1.5;
    let doc = ok_json(&["bounds"]);
    let single = row(&doc, "parameter", "r_s")["bound"].as_f64().unwrap();
    assert!(within(single, 2.4e-5), "{single}");
    for r in doc["rows"].as_array().unwrap() {
        assert_eq!(r["ratio_4N"].as_f64().unwrap(), 0.5, "{r}");
        assert!(!r["formula"].as_str().unwrap().is_empty());
    }

    let dir = tempfile::tempdir().unwrap();
    let mut s = base_scenario();
    s["scheme"] = json!({"kind": "two_mode_squeezed", "r": 1.5});
    let path = write(dir.path(), "two.json", &s);
    let doc = ok_json(&["--scenario", &path, "bounds"]);
    let two = row(&doc, "parameter", "r_s")["bound"].as_f64().unwrap();
    assert!(within(two, 4.8e-5), "{two}");
}

#[test]
fn reproduction_report() {
    let out = gravmetro(&["--no-timestamp", "--format", "json", "reproduce-paper"], None);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["metadata"]["L"].as_str().unwrap().contains("3.6e6"));
    let rows = doc["rows"].as_array().unwrap();
    let quoted = |name: &str| {
        rows.iter()
            .filter(|r| r["check"] == name && r["preset"] == "state-of-the-art-400THz")
            .collect::<Vec<_>>()
    };
    assert_eq!(quoted("figure_of_merit")[0]["status"], "pass");
    assert_eq!(quoted("single_mode_rs")[0]["status"], "pass");
    assert_eq!(quoted("two_mode_rs")[0]["status"], "pass");
    let dets = quoted("single_mode_fisher_det");
    // Both conventions under both central-matrix modes.
    assert_eq!(dets.len(), 4);
    assert!(dets.iter().all(|r| r["status"] == "pass"));
    assert!(rows.iter().any(|r| r["check"] == "five_year_single_mode_rs"));
    assert!(rows.iter().any(|r| r["preset"] == "comm-700THz"));
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn sweep_over_n_has_inverse_root_slope() {
    let doc = ok_json(&["sweep", "--axis", "N", "--from", "1e4", "--to", "1e16", "--steps", "13", "--spacing", "log"]);
    let n: Vec<f64> = values(&doc, "value").iter().map(|v| v.ln()).collect();
    for col in ["bound_x", "bound_rs", "bound_L"] {
        let b: Vec<f64> = values(&doc, col).iter().map(|v| v.ln()).collect();
        assert!((least_squares_slope(&n, &b) + 0.5).abs() < 1e-6, "{col}");
    }
    let idx: Vec<f64> = values(&doc, "index");
    assert_eq!(idx, (0..13).map(f64::from).collect::<Vec<_>>());
}

#[test]
fn squeezing_beats_coherent_at_equal_photon_number() {
    let doc = ok_json(&["sweep", "--axis", "r", "--from", "0.2", "--to", "3", "--steps", "8"]);
    for r in doc["rows"].as_array().unwrap() {
        let x = r["x"].as_f64().unwrap();
        assert!(x < 1.0);
        assert!(r["bound_x"].as_f64().unwrap() < r["bound_x_coherent_same_nbar"].as_f64().unwrap());
    }
}

#[test]
fn sweep_over_separation_follows_closed_form() {
    let doc = ok_json(&["sweep", "--axis", "L", "--from", "1e5", "--to", "1e8", "--steps", "20", "--spacing", "log"]);
    let g = SchwarzschildGeometry::earth();
    let s = SchemeSpec::single_mode_squeezed(1.5, 4e14);
    let bounds = values(&doc, "bound_rs");
    for (l, b) in values(&doc, "value").iter().zip(&bounds) {
        let p = ObserverPair::from_separation(6.371e6, *l).unwrap();
        let oracle = printed_bound_rs(&s, &g, &p, 1e6, 1e10).unwrap().unwrap();
        assert!(((b - oracle) / oracle).abs() < 1e-8);
    }
    assert!(bounds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn outputs_are_reproducible_without_timestamp() {
    for args in [&["bounds"][..], &["overlap"], &["fisher-matrix"], &["reproduce-paper"]] {
        for fmt in ["table", "csv", "json"] {
            let mut full = vec!["--no-timestamp", "--format", fmt];
            full.extend_from_slice(args);
            let a = gravmetro(&full, None);
            let b = gravmetro(&full, None);
            assert!(a.status.success());
            assert_eq!(a.stdout, b.stdout, "{args:?} {fmt}");
        }
    }
    let stamped = gravmetro(&["--format", "json", "redshift"], None);
    let v: Value = serde_json::from_slice(&stamped.stdout).unwrap();
    assert!(v["generated_at_unix"].as_u64().is_some());
}

#[test]
fn validate_default_scenario_passes_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = base_scenario();
    s["estimator"] = json!({"n_shots": 500, "replicas": 200});
    let path = write(dir.path(), "mc.json", &s);
    let out = gravmetro(&["--no-timestamp", "--format", "csv", "--scenario", &path, "--seed", "777", "validate"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scheme,theta_true,N,replicas,var_emp,var_crb_quantum,ratio,seed");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "single_mode_squeezed");
    assert_eq!(fields[2], "500");
    assert_eq!(fields[3], "200");
    assert_eq!(fields[7], "777");
    assert!(fields[6].parse::<f64>().unwrap() >= 1.0);
}

#[test]
fn too_few_replicas_are_rejected() {
    let out = gravmetro(&["validate", "--replicas", "99"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("replicas"));
}

#[test]
fn invalid_scenarios_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("extra", json!({"G": 6.7e-11}), "unknown field"),
        ("version", json!({"schema_version": 2}), "schema_version"),
        ("both", json!({"l": 3.6e7}), "r_b"),
        ("mu", json!({"scheme": {"kind": "single_mode_squeezed", "r": 1.0, "mu_a": 0.5}}), "scheme.mu_a"),
        ("inside", json!({"geometry": {"r_s": 1e7}}), "r_a"),
        ("packet", json!({"packet": {"omega0": 4e14}}), "packet"),
        ("n", json!({"N": 0.5}), "`N`"),
    ];
    for (name, patch, needle) in cases {
        let mut s = base_scenario();
        for (k, v) in patch.as_object().unwrap() {
            s[k] = v.clone();
        }
        let path = write(dir.path(), &format!("{name}.json"), &s);
        let out = gravmetro(&["--scenario", &path, "redshift"], None);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
}

#[test]
fn scenario_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = base_scenario();
    s["r_b"] = json!(2.0e7);
    write(dir.path(), "default.json", &s);
    s["r_b"] = json!(3.0e7);
    write(dir.path(), "other.json", &s);
    let r_b = |args: &[&str]| {
        let mut full = vec!["--no-timestamp", "--format", "json"];
        full.extend_from_slice(args);
        let out = gravmetro(&full, Some(dir.path()));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["metadata"]["r_B"].as_str().unwrap().to_string()
    };
    assert_eq!(r_b(&["redshift"]), "2e7 m");
    assert_eq!(r_b(&["--scenario", "other.json", "redshift"]), "3e7 m");
}

#[test]
fn scenario_format_is_used_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = base_scenario();
    s["format"] = json!("csv");
    let path = write(dir.path(), "csv.json", &s);
    let out = gravmetro(&["--scenario", &path, "redshift"], None);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("quantity,value,formula"));
    let out = gravmetro(&["--scenario", &path, "--format", "json", "--no-timestamp", "redshift"], None);
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_ok());
}
