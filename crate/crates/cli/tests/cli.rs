use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn mixasym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixasym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn config(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../configs");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("mixasym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn kou_config(eta1: f64) -> String {
    format!(
        r#"{{"model":"heston+kou",
            "heston":{{"a":1,"b":2,"c":0.5,"rho":-0.3,"y0":0.04}},
            "kou":{{"lambda":1,"eta1":{eta1:?},"eta2":3,"p":0.5}}}}"#
    )
}

fn constants(args: &[&str]) -> Value {
    let mut full = vec!["constants"];
    full.extend_from_slice(args);
    let out = mixasym(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn constants_reference_values() {
    let c = constants(&[]);
    let s_plus = c["critical_moments"]["s_plus"].as_f64().unwrap();
    let s_minus = c["critical_moments"]["s_minus"].as_f64().unwrap();
    assert!((s_plus - 12.4558).abs() < 1e-4);
    assert!((s_minus + 7.0507).abs() < 1e-4);
    let a3 = c["tail_constants"]["A3"].as_f64().unwrap();
    let a3t = c["tail_constants"]["A3t"].as_f64().unwrap();
    assert!((a3 - (s_plus + 1.0)).abs() < 1e-12);
    assert!((a3t + s_minus + 1.0).abs() < 1e-12);
    assert_eq!(c["model"], "heston+kou");
    assert_eq!(c["wings"]["large"]["regime"], "jump");
    assert_eq!(c["wings"]["small"]["regime"], "jump");
    assert_eq!(c["jump_coefficients"].as_array().unwrap().len(), 20);
}

#[test]
fn constants_default_matches_reference_file() {
    assert_eq!(constants(&[]), constants(&["--config", &config("heston-kou.json")]));
}

#[test]
fn degenerate_kou_rate_is_reported() {
    let s_plus = constants(&[])["critical_moments"]["s_plus"].as_f64().unwrap();
    let path = scratch("degenerate.json", &kou_config(s_plus));
    let c = constants(&["--config", &path]);
    assert_eq!(c["wings"]["large"]["regime"], "degenerate");
    assert_eq!(c["wings"]["small"]["regime"], "jump");
}

#[test]
fn kou_rate_at_most_one_is_rejected() {
    let path = scratch("bad-eta.json", &kou_config(1.0));
    let out = mixasym(&["constants", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_config_field_is_rejected() {
    let path = scratch("typo.json", r#"{"model":"heston","heston":{"a":1,"b":2,"c":0.5,"rho":-0.3,"y0":0.04,"yo":1}}"#);
    assert_eq!(mixasym(&["constants", "--config", &path]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mixasym(&["density"]).status.code(), Some(1));
    assert_eq!(mixasym(&["density", "--grid", "2:5:x"]).status.code(), Some(1));
    assert_eq!(mixasym(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mixasym(&["--help"]).status.code(), Some(0));
}

#[test]
fn density_csv_shape_and_trend() {
    let out = mixasym(&["density", "--grid", "2:1e8:8log"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "x,asymptote,oracle_fourier,ratio,error_bound");
    let rows = rows(&text);
    assert_eq!(rows.len(), 8);
    let with_oracle: Vec<_> = rows.iter().filter(|r| !r[2].is_empty()).collect();
    assert!(with_oracle.len() >= 4);
    let ratios: Vec<f64> = with_oracle.iter().map(|r| num(&r[3])).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    let last = *ratios.last().unwrap();
    assert!(last > 0.5 && last < 1.0);
    for r in &rows {
        assert!(num(&r[1]) > 0.0);
        if num(&r[0]) > (12.0f64).exp() {
            assert!(r[2].is_empty() && r[3].is_empty());
        }
    }
}

#[test]
fn density_asymptote_is_blank_at_one() {
    let out = mixasym(&["density", "--grid", "1:1:1"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert!(rows[0][1].is_empty());
}

#[test]
fn smile_csv_residuals_are_order_inverse_log() {
    let out = mixasym(&["smile", "--grid", "1e3:1e30:10log"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "K,L,iv_expansion,iv_from_asymptotic_price,residual,residual_x_L");
    for r in rows(&text) {
        let (k, l) = (num(&r[0]), num(&r[1]));
        assert!((k.ln() - l).abs() < 1e-9);
        assert!(num(&r[2]) > 0.0 && num(&r[3]) > 0.0);
        assert!(num(&r[5]).abs() < 0.2, "{r:?}");
        assert!((num(&r[4]) * l - num(&r[5])).abs() < 1e-12);
    }
}

#[test]
fn smile_small_wing_strikes() {
    let out = mixasym(&["smile", "--grid", "1e-12:1e-3:4log"]);
    assert!(out.status.success());
    for r in rows(&stdout(&out)) {
        assert!((num(&r[0]).ln() + num(&r[1])).abs() < 1e-9);
        assert!(num(&r[5]).abs() < 0.2, "{r:?}");
    }
}

#[test]
fn smile_guard_violation_writes_nothing() {
    let out = mixasym(&["smile", "--grid", "10:1e6:3log"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn validate_subset_passes() {
    let out = mixasym(&["validate", "--criterion", "5", "--criterion", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("PASS [ 5]")));
    assert!(text.lines().any(|l| l.starts_with("PASS [10]")));
}

#[test]
fn validate_loose_oracle_names_failing_criterion() {
    let out = mixasym(&["validate", "--criterion", "6", "--tol", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("FAIL [ 6]")), "{text}");
}

#[test]
fn validate_rejects_unknown_criterion() {
    assert_eq!(mixasym(&["validate", "--criterion", "13"]).status.code(), Some(1));
}

#[test]
fn sample_is_deterministic_under_seed() {
    let a = mixasym(&["sample", "--paths", "500", "--seed", "7"]);
    let b = mixasym(&["sample", "--paths", "500", "--seed", "7"]);
    let c = mixasym(&["sample", "--paths", "500", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "x_t");
    assert_eq!(text.lines().count(), 501);
    assert!(text.lines().skip(1).all(|l| num(l) > 0.0));
}

#[test]
fn smile_coefficients_match_across_models() {
    let kou = constants(&[]);
    let nig = constants(&["--config", &config("heston-nig.json")]);
    assert_eq!(nig["wings"]["small"]["extrapolated_by_symmetry"], true);
    let heston = constants(&["--config", &config("heston.json")]);
    assert_eq!(heston["wings"]["large"]["regime"], "diffusion");
    assert!(heston.get("jumps").is_none() || heston["jumps"].is_null());
    assert!(kou["wings"]["large"]["smile"]["c_lead"].as_f64().unwrap() > 0.0);
}
