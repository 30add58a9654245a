use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn periods(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_periods")).args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, doc)
}

fn check<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn span_check_reports_the_expected_ranks() {
    let (code, doc) = periods(&["span-check", "--n", "6"]);
    assert_eq!(code, 0);
    // n(n-1)/2 and n(n+1)/2 for n = 6.
    assert_eq!(check(&doc, "tau_independence")["result"]["rank"], 15);
    assert_eq!(check(&doc, "direct_sum_e1v")["result"]["rank_union"], 21);
    assert_eq!(check(&doc, "sigma_span")["result"]["dims"], serde_json::json!([15, 15, 15, 15, 15]));
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["claim"].is_string()));

    let (code, doc) = periods(&["span-check", "--n", "6", "--zero-sum"]);
    assert_eq!(code, 0);
    assert_eq!(check(&doc, "sigma_span")["result"]["zero_sum"], true);
}

#[test]
fn span_check_smallest_case_skips_sigma() {
    let (code, doc) = periods(&["span-check", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(check(&doc, "tau_independence")["result"]["rank"], 1);
    assert_eq!(check(&doc, "direct_sum_e1v")["result"]["rank_union"], 3);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn argument_errors_exit_with_two() {
    assert_eq!(periods(&["span-check", "--n", "1"]).0, 2);
    assert_eq!(periods(&["span-check"]).0, 2);
    assert_eq!(periods(&["periods", "--curve", &data("missing.json")]).0, 2);
    assert_eq!(periods(&["phi", "--form", "e8", "--point", &data("point_g1.json"), "--t-list", "1,2"]).0, 2);
    assert_eq!(periods(&["rauch", "--curve", &data("g2.json"), "--branch", "9"]).0, 2);
}

#[test]
fn genus_one_curves_give_the_classical_j_values() {
    // y^2 = x^3 - x has j = 1728, y^2 = x^3 - 1 has j = 0.
    for (file, j) in [("g1_square.json", 1728.0), ("g1_hexagonal.json", 0.0)] {
        let (code, doc) = periods(&["periods", "--curve", &data(file)]);
        assert_eq!(code, 0, "{file}");
        let d = &check(&doc, "period_matrix")["result"]["diagnostics"];
        let got = d["j_from_tau"].as_array().unwrap();
        let err = ((got[0].as_f64().unwrap() - j).powi(2) + got[1].as_f64().unwrap().powi(2)).sqrt();
        assert!(err < 1728.0 * 1e-6, "{file}: {got:?}");
    }
}

#[test]
fn coincident_branch_points_are_a_numerical_failure() {
    let (code, doc) = periods(&["periods", "--curve", &data("coincident.json")]);
    assert_eq!(code, 3);
    assert!(doc["error"].as_str().unwrap().contains("ill-conditioned"));
}

#[test]
fn rauch_and_fay_fit_pass_on_the_sample_inputs() {
    let (code, doc) = periods(&["rauch", "--curve", &data("g2.json"), "--branch", "1"]);
    assert_eq!(code, 0);
    assert!(check(&doc, "schiffer_rank_one")["result"]["rank1_ratio"].as_f64().unwrap() < 1e-3);

    let (code, doc) = periods(&["fay-fit", "--family", &data("collide.json")]);
    assert_eq!(code, 0);
    let r = &check(&doc, "fay_degeneration")["result"];
    assert!(r["r_squared"].as_f64().unwrap() > 0.999);
    assert!(r["aj_limit"]["distance"].as_f64().unwrap() < 1e-3);
}

#[test]
fn schottky_vanishes_at_a_jacobian_and_reports_failed_expectations() {
    let (code, doc) = periods(&["schottky", "--curve", &data("g4hyp.json")]);
    assert_eq!(code, 0);
    assert!(check(&doc, "schottky")["result"]["relative"].as_f64().unwrap() < 1e-4);

    // F vanishes identically in degree 2, so asking for a nonzero value fails.
    let (code, doc) = periods(&["schottky", "--point", &data("point_g2.json"), "--expect", "nonzero"]);
    assert_eq!(code, 1);
    assert_eq!(doc["pass"], false);
}

#[test]
fn phi_lowers_the_degree() {
    for (form, point) in [("e8", "point_g1.json"), ("schottky", "point_g3.json")] {
        let (code, doc) = periods(&["phi", "--form", form, "--point", &data(point)]);
        assert_eq!(code, 0, "{form}");
        assert_eq!(check(&doc, "phi_operator")["pass"], true);
    }
}

#[test]
fn reports_are_reproducible_and_can_go_to_a_file() {
    let dir = std::env::temp_dir().join(format!("periods-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let files: Vec<PathBuf> = (0..2).map(|i| dir.join(format!("r{i}.json"))).collect();
    for f in &files {
        let (code, _) = periods(&["span-check", "--n", "7", "--seed", "11", "--out", f.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let a = std::fs::read(&files[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&files[1]).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
