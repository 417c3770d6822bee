#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use sobolev_core::bubble::BubbleSpec;
use sobolev_core::params::derive_params;
use sobolev_core::profile::SampledProfile;
use sobolev_core::quadrature::QuadConfig;
use sobolev_core::Lab64;

fn lab_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobolev-lab"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn key_values(out: &Output) -> HashMap<String, String> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value"));
    lines
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn num(m: &HashMap<String, String>, k: &str) -> f64 {
    m[k].parse().unwrap_or_else(|_| panic!("{k} = {} is not a number", m[k]))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sobolev-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn constants_match_closed_forms() {
    let out = lab_bin(&["constants", "--N", "3", "--p", "2"]);
    assert!(out.status.success());
    let m = key_values(&out);
    assert_eq!(m["N"], "3");
    assert!((num(&m, "p_star") - 6.0).abs() < 1e-12);
    assert!((num(&m, "p_bar") - 3.0).abs() < 1e-12);
    assert!((num(&m, "sharp_s") / common::talenti_s(3, 2.0) - 1.0).abs() < 1e-9);
    assert!((num(&m, "gamma_np") / common::bubble_gamma(3, 2.0) - 1.0).abs() < 1e-12);
    assert!((num(&m, "sphere_measure") / (4.0 * std::f64::consts::PI) - 1.0).abs() < 1e-12);
    assert_eq!(m["tail_exponent_matches"], "true");

    let m = key_values(&lab_bin(&["constants", "--N", "4", "--p", "3"]));
    assert!((num(&m, "sharp_s") / common::talenti_s(4, 3.0) - 1.0).abs() < 1e-9);
}

#[test]
fn constants_below_weak_threshold_skip_proof_constants() {
    let out = lab_bin(&["constants", "--N", "3", "--p", "1.4"]);
    assert!(out.status.success());
    let m = key_values(&out);
    assert_eq!(m["weak_norm_valid"], "false");
    assert!(!m.contains_key("B"));
}

#[test]
fn weak_threshold_is_a_domain_error() {
    let out = lab_bin(&["check", "--theorem", "thm11", "--N", "3", "--p", "1.4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p > 2N/(N+1)"), "{err}");
}

#[test]
fn unknown_flag_and_missing_values_exit_2() {
    assert_eq!(lab_bin(&["constants", "--N", "3", "--p", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(lab_bin(&["constants", "--N", "3"]).status.code(), Some(2));
    assert_eq!(lab_bin(&["constants", "--N", "3", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn pointwise_check_passes() {
    let out = lab_bin(&["check", "--theorem", "pointwise", "--N", "3", "--p", "2", "--seed", "7", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().count() > 3);
}

#[test]
fn tail_check_exits_zero_and_reports_displayed_failures() {
    let out = lab_bin(&["check", "--theorem", "tail29", "--N", "3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(summary["displayed_bound_failures"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_supplies_flags() {
    let path = scratch("lab.toml");
    std::fs::write(&path, "N = 4\np = 3.0\n").unwrap();
    let from_file = key_values(&lab_bin(&["--config", path.to_str().unwrap(), "constants"]));
    assert!((num(&from_file, "sharp_s") / common::talenti_s(4, 3.0) - 1.0).abs() < 1e-9);
    // flags win over the file
    let overridden = key_values(&lab_bin(&["--config", path.to_str().unwrap(), "constants", "--p", "2"]));
    assert!((num(&overridden, "p_star") - 4.0).abs() < 1e-12);

    std::fs::write(&path, "N = 4\nbogus = 1\n").unwrap();
    assert_eq!(lab_bin(&["--config", path.to_str().unwrap(), "constants"]).status.code(), Some(2));
}

#[test]
fn norms_and_project_read_profile_csv() {
    let radius = 20.0;
    let lab = Lab64::new(derive_params(3, 2.0).unwrap(), QuadConfig::default()).unwrap();
    let u = lab.bubble.profile(BubbleSpec { c: 1.0, lambda: 2.0 });
    // shifted down so it vanishes on the boundary
    let edge = u.value(radius);
    let raw = u.sample_uniform(4001, radius).unwrap();
    let values = raw.values().iter().map(|v| v - edge).collect();
    let samples =
        SampledProfile::with_slopes(raw.radii().to_vec(), values, raw.slopes().to_vec(), radius).unwrap();
    let path = scratch("bubble.csv");
    let mut buf = Vec::new();
    samples.write_csv(&mut buf, 3, 2.0).unwrap();
    std::fs::write(&path, buf).unwrap();

    let out = lab_bin(&["norms", "--in", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = key_values(&out);
    let om = common::sphere(3);
    let crit = (om * common::radial_integral(3, |r| (common::bubble(3, 2.0, 2.0, r) - edge).powi(6), 0.0, radius, 200_000))
        .powf(1.0 / 6.0);
    assert!((num(&m, "crit") / crit - 1.0).abs() < 1e-5, "{} vs {crit}", m["crit"]);
    assert!(num(&m, "deficit") > 0.0);

    let out = lab_bin(&["project", "--in", path.to_str().unwrap()]);
    assert!(out.status.success());
    let m = key_values(&out);
    assert_eq!(m["converged"], "true");
    // truncation at 40 bubble widths moves the optimum only slightly
    assert!((num(&m, "lambda_opt") / 2.0 - 1.0).abs() < 0.1, "{}", m["lambda_opt"]);
    assert!((num(&m, "c_opt") - 1.0).abs() < 0.1, "{}", m["c_opt"]);
}
