//! End-to-end tests of the `dwork-pf` binary: exit codes, JSON shapes and
//! byte-level determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwork-pf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn family_census_quartic() {
    let out = run(&["family", "--n", "4", "--d", "4", "--w", "1,1,1,1"]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["family"]["dW"], 4);
    assert_eq!(json["family"]["b"], serde_json::json!([1, 0, 0, 0]));
    let reps = json["representatives"].as_array().unwrap();
    assert_eq!(reps.len(), 3, "three symmetry classes");
    let ranks: Vec<i64> = reps.iter().map(|r| r["rank"].as_i64().unwrap()).collect();
    assert_eq!(ranks, vec![3, 2, 1]);
    assert_eq!(json["orbit_count"], 16);
    // The rank-2 class is the one whose cyclic basis degenerates.
    assert_eq!(reps[1]["v"], "1,1,3,3");
    assert_eq!(reps[1]["cyclic_basis_ok"], false);
    assert_eq!(reps[0]["cyclic_basis_ok"], true);
}

#[test]
fn family_census_hesse() {
    let out = run(&["family", "--n", "3", "--d", "3", "--w", "1,1,1"]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    let reps = json["representatives"].as_array().unwrap();
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0]["v"], "1,1,1");
    assert_eq!(reps[0]["rank"], 2);
}

#[test]
fn family_rejects_bad_weights() {
    let out = run(&["family", "--n", "3", "--d", "4", "--w", "1,1,1"]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sum"), "diagnostic names the violated condition");
}

#[test]
fn operator_lambda_coordinates() {
    let out = run(&[
        "operator", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,2,2,3",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    // D - λ⁴(D + 2)
    assert_eq!(json["operator"]["variable"], "lambda");
    let terms = json["operator"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["dpow"], 0);
    assert_eq!(
        terms[0]["coeffs"],
        serde_json::json!(["0", "0", "0", "0", "-2"])
    );
    assert_eq!(terms[1]["dpow"], 1);
    assert_eq!(
        terms[1]["coeffs"],
        serde_json::json!(["1", "0", "0", "0", "-1"])
    );
}

#[test]
fn operator_t_coordinates_katz() {
    let out = run(&[
        "operator", "--n", "3", "--d", "4", "--w", "1,1,2", "--v", "1,1,2",
        "--coords", "t", "--raw",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    // For V = W the raw parameters are α = {k/d}, β = {j/w_i}; the pairs
    // (1/2, 1/2) and one (1, 1) cancel.
    assert_eq!(
        json["raw_operator"]["alphas"],
        serde_json::json!(["1/4", "1/2", "3/4", "1"])
    );
    assert_eq!(
        json["raw_operator"]["betas"],
        serde_json::json!(["1/2", "1", "1", "1"])
    );
    assert_eq!(json["operator"]["alphas"], serde_json::json!(["1/4", "3/4"]));
    assert_eq!(json["operator"]["betas"], serde_json::json!(["1", "1"]));
}

#[test]
fn operator_rejects_degenerate_class() {
    let out = run(&[
        "operator", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "0,1,1,2",
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rank"), "diagnostic reports the rank");
}

#[test]
fn verify_quartic_family() {
    let out = run(&["verify", "--n", "4", "--d", "4", "--w", "1,1,1,1"]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["verified"], true);
    let results = json["results"].as_array().unwrap();
    assert_eq!(results.len(), 6, "P' and P for each of three classes");
    assert!(results.iter().all(|r| r["annihilates"] == true));
    assert!(results.iter().all(|r| r["wall_time_ms"].is_u64()));
}

#[test]
fn verify_hesse_cubic() {
    let out = run(&["verify", "--n", "3", "--d", "3", "--w", "1,1,1"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn verify_mutation_hook_fails() {
    let out = run(&[
        "verify", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,2,2,3",
        "--mutate",
    ]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["verified"], false);
    let results = json["results"].as_array().unwrap();
    let mutant = results.iter().find(|r| r["operator"] == "P+1").unwrap();
    assert_eq!(mutant["annihilates"], false);
}

#[test]
fn verify_resource_cap_exit() {
    // A degree-36 component needs a membership basis beyond the row cap.
    let out = run(&[
        "verify", "--n", "3", "--d", "36", "--w", "1,1,34", "--v", "1,1,34",
    ]);
    assert_eq!(exit_code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap"), "diagnostic mentions the cap: {err}");
}

#[test]
fn deformation_binomial_coefficients() {
    let out = run(&[
        "deformation", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,2,2,3",
        "--order", "20",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    // (1-λ⁴)^{-1/2} = 1 + λ⁴/2 + 3λ⁸/8 + 5λ¹²/16 + 35λ¹⁶/128 + ...
    let a00 = json["a"][0][0].as_array().unwrap();
    assert_eq!(a00[0], "1");
    assert_eq!(a00[4], "1/2");
    assert_eq!(a00[8], "3/8");
    assert_eq!(a00[12], "5/16");
    assert_eq!(a00[16], "35/128");
    assert_eq!(json["basis_change"], Value::Null);
}

#[test]
fn deformation_corrected_class() {
    let out = run(&[
        "deformation", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,1,3,3",
        "--order", "12",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    // B = diag(1, 1/(2λ)) recorded in the basis-change block.
    let b = &json["basis_change"]["matrix"];
    assert_eq!(b[0][0]["num"], serde_json::json!(["1"]));
    assert_eq!(b[0][0]["den"], serde_json::json!(["1"]));
    assert_eq!(b[1][1]["num"], serde_json::json!(["1/2"]));
    assert_eq!(b[1][1]["den"], serde_json::json!(["0", "1"]));
    // A(0) = I.
    assert_eq!(json["a"][0][0][0], "1");
    assert_eq!(json["a"][0][1][0], "0");
    assert_eq!(json["a"][1][1][0], "1");
    assert_eq!(json["exponents"], serde_json::json!([0, 2]));
}

#[test]
fn deformation_order_below_rank() {
    let out = run(&[
        "deformation", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,1,1,1",
        "--order", "2",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn frobenius_round_trip() {
    let dir = std::env::temp_dir().join("dwork-pf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let f0_path = dir.join("f0.json");
    std::fs::write(&f0_path, r#"[["3/5"]]"#).unwrap();
    let out = run(&[
        "frobenius", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,2,2,3",
        "--p", "3", "--f0", f0_path.to_str().unwrap(), "--order", "12",
        "--prec", "2",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["residual_zero"], true);
    assert_eq!(json["v1"], "3,2,2,1");
    assert_eq!(json["f"][0][0][0], "3/5");
    assert_eq!(json["mod"]["p"], 3);
    assert_eq!(json["mod"]["N"], 2);
    // 3/5 mod 9 = 3·2 = 6 (5⁻¹ ≡ 2 mod 9).
    assert_eq!(json["mod"]["coeffs"][0][0][0], "6");
}

#[test]
fn frobenius_rejects_dividing_prime() {
    let dir = std::env::temp_dir().join("dwork-pf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let f0_path = dir.join("f0-bad.json");
    std::fs::write(&f0_path, r#"[["1"]]"#).unwrap();
    let out = run(&[
        "frobenius", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--v", "1,2,2,3",
        "--p", "2", "--f0", f0_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["family", "--n", "4", "--d", "4", "--w", "1,1,1,1"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "byte-identical output");

    // Verification output is deterministic up to the wall_time_ms field.
    let args = ["verify", "--n", "3", "--d", "3", "--w", "1,1,1"];
    let normalize = |out: &Output| {
        let mut json = stdout_json(out);
        for r in json["results"].as_array_mut().unwrap() {
            r["wall_time_ms"] = Value::from(0);
        }
        json.to_string()
    };
    let first = run(&args);
    let second = run(&args);
    assert_eq!(normalize(&first), normalize(&second));
}

#[test]
fn parallel_jobs_agree_with_serial() {
    let serial = run(&["family", "--n", "4", "--d", "4", "--w", "1,1,1,1"]);
    let parallel = run(&[
        "family", "--n", "4", "--d", "4", "--w", "1,1,1,1", "--jobs", "4",
    ]);
    assert_eq!(serial.stdout, parallel.stdout);
}
