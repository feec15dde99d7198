use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;
use servo_forge::exogenous::SignalModel;
use servo_forge::internal_model::{design_im, realize_closed_loop_im};
use servo_forge::lti::StateSpace;
use servo_forge::sim::{simulate, SignalSpec};
use servo_forge::Complex;
use tempfile::TempDir;

const IM_CONTROL: &str = "-1+2i,-1-2i,-1.7321+1i,-1.7321-1i";
const IM_ESTIMATOR: &str = "-5+8.6603i,-5-8.6603i";
const XEST_CONTROL: &str = "-1+1.7321i,-1-1.7321i";
const XEST_ESTIMATOR: &str = "-1.7321+1i,-1.7321-1i,-3+5.1962i,-3-5.1962i";

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_servo-forge"))
        .args(args)
        .env_remove("SERVO_FORGE_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Json {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_error(out: &Output) -> Json {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr line");
    serde_json::from_str::<Json>(line).expect("error JSON")["error"].clone()
}

fn design(dir: &TempDir, method: &str, control: &str, estimator: Option<&str>) -> PathBuf {
    let out = dir.path().join(format!("{method}.json"));
    let servo = data("servo.json");
    let mut args = vec!["design", method, "--plant", servo.to_str().unwrap(), "--d", "0,1", "--control-poles", control];
    if let Some(e) = estimator {
        args.extend(["--estimator-poles", e]);
    }
    args.extend(["--out", out.to_str().unwrap()]);
    let res = run(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let summary = stdout_json(&res);
    assert!(summary["max_mismatch"].as_f64().unwrap() < 1e-6);
    out
}

fn simulate_cli(ctrl: &Path, extra: &[&str], csv: &Path) -> (Output, Json) {
    let servo = data("servo.json");
    let mut args = vec![
        "simulate",
        "--plant",
        servo.to_str().unwrap(),
        "--controller",
        ctrl.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ];
    args.extend(extra);
    let out = run(&args);
    let summary = if code(&out) == 0 { stdout_json(&out) } else { Json::Null };
    (out, summary)
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn im_design_writes_controller_keys() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "im", IM_CONTROL, Some(IM_ESTIMATOR));
    let ctrl: Json = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    for key in ["kz", "keta", "d", "lx"] {
        assert!(ctrl.get(key).is_some(), "{key}");
    }
    assert_eq!(ctrl["d"], serde_json::json!([1.0, 0.0, 1.0]));
}

#[test]
fn xest_design_reproduces_known_gain() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "xest", "-1+1.7320508075688772i,-1-1.7320508075688772i", Some(XEST_ESTIMATOR));
    let ctrl: Json = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let k: Vec<f64> = serde_json::from_value(ctrl["kzx"].clone()).unwrap();
    assert!((k[0] - 4.0).abs() < 1e-8 && (k[1] - 1.0).abs() < 1e-8, "{k:?}");
}

#[test]
fn design_to_file_round_trip_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "im", IM_CONTROL, Some(IM_ESTIMATOR));
    let csv = dir.path().join("trace.csv");
    let (out, _) = simulate_cli(&path, &["--ref", "sine:1:1", "--sat", "1.0", "--tend", "5"], &csv);
    assert_eq!(code(&out), 0);

    let plant: StateSpace = serde_json::from_str(&std::fs::read_to_string(data("servo.json")).unwrap()).unwrap();
    let poles = |s: &str| s.split(',').map(|v| v.parse::<Complex>().unwrap()).collect::<Vec<_>>();
    let ctrl = design_im(&plant, &SignalModel::sine(1.0).unwrap(), &poles(IM_CONTROL), &poles(IM_ESTIMATOR)).unwrap();
    let cl = realize_closed_loop_im(&plant, &ctrl, 1.0).unwrap();
    let tr = simulate(&cl, &SignalSpec::sine(1.0, 1.0, 0.0).unwrap(), &SignalSpec::zero(), 5.0, 1e-3).unwrap();
    assert_eq!(csv_column(&csv, "y"), tr.y);
    assert_eq!(csv_column(&csv, "u"), tr.u);
    assert_eq!(csv_column(&csv, "e"), tr.e);
}

#[test]
fn sine_tracking_with_and_without_perturbation() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("trace.csv");
    for (method, control, estimator) in
        [("im", IM_CONTROL, Some(IM_ESTIMATOR)), ("xest", XEST_CONTROL, Some(XEST_ESTIMATOR))]
    {
        let path = design(&dir, method, control, estimator);
        for extra in [&["--sat", "inf"][..], &["--sat", "inf", "--perturb", "f:1,1:-1.1"][..]] {
            let (out, summary) = simulate_cli(&path, extra, &csv);
            assert_eq!(code(&out), 0);
            let sse = summary["steady_state_error"].as_f64().unwrap();
            assert!(sse < 1e-3, "{method} {extra:?}: {sse}");
        }
    }
}

#[test]
fn model_following_loses_tracking_under_perturbation() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "mf", XEST_CONTROL, None);
    let csv = dir.path().join("trace.csv");
    let (_, nominal) = simulate_cli(&path, &["--sat", "inf"], &csv);
    assert!(csv_column(&csv, "eta").len() == 25_001);
    let (_, perturbed) = simulate_cli(&path, &["--sat", "inf", "--perturb", "f:1,1:-1.1"], &csv);
    assert!(nominal["steady_state_error"].as_f64().unwrap() < 1e-3);
    assert!(perturbed["steady_state_error"].as_f64().unwrap() > 1e-2);
}

#[test]
fn missing_plant_is_an_io_error() {
    let res = run(&[
        "design",
        "im",
        "--plant",
        "/nonexistent/plant.json",
        "--d",
        "0,1",
        "--control-poles",
        IM_CONTROL,
        "--estimator-poles",
        IM_ESTIMATOR,
    ]);
    assert_eq!(code(&res), 2);
    assert_eq!(stderr_error(&res)["kind"], "io");
}

#[test]
fn plant_zero_on_the_model_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let plant = dir.path().join("zero.json");
    std::fs::write(&plant, r#"{"num": [1.0, 0.0, 1.0], "den": [1.0, 3.0, 3.0, 1.0]}"#).unwrap();
    let res = run(&[
        "design",
        "im",
        "--plant",
        plant.to_str().unwrap(),
        "--d",
        "0,1",
        "--control-poles=-1,-2,-3,-4,-5",
        "--estimator-poles=-2,-3,-4",
    ]);
    assert_eq!(code(&res), 3);
    assert_eq!(stderr_error(&res)["kind"], "infeasible");
}

#[test]
fn non_conjugate_pole_list_is_rejected() {
    let servo = data("servo.json");
    let res =
        run(&["design", "mf", "--plant", servo.to_str().unwrap(), "--d", "0,1", "--control-poles", "-1+1i,-1-2i"]);
    assert_eq!(code(&res), 2);
}

#[test]
fn zero_horizon_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "xest", XEST_CONTROL, Some(XEST_ESTIMATOR));
    let (out, _) = simulate_cli(&path, &["--tend", "0"], &dir.path().join("t.csv"));
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_error(&out)["kind"], "usage");
}

#[test]
fn divergence_reports_time() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "xest", XEST_CONTROL, Some(XEST_ESTIMATOR));
    // A large reversed input gain destabilizes the loop.
    let (out, _) = simulate_cli(
        &path,
        &["--sat", "inf", "--perturb", "g:1,0:-400", "--tend", "200", "--dt", "0.01"],
        &dir.path().join("t.csv"),
    );
    assert_eq!(code(&out), 4);
    let err = stderr_error(&out);
    assert_eq!(err["kind"], "divergence");
    assert!(err["detail"]["time"].as_f64().unwrap() > 0.0);
}

#[test]
fn perturbation_outside_plant_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "xest", XEST_CONTROL, Some(XEST_ESTIMATOR));
    let (out, _) = simulate_cli(&path, &["--perturb", "f:2,0:1"], &dir.path().join("t.csv"));
    assert_eq!(code(&out), 2);
}

#[test]
fn audit_lead_loop_both_integrals() {
    let res = run(&["audit", "--loop", data("loop_double_integrator_lead.json").to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    let report = stdout_json(&res);
    let s = &report["sensitivity"];
    assert!((s["numeric"].as_f64().unwrap() + PI / 2.0).abs() < 1e-2);
    assert!((s["closed_form"].as_f64().unwrap() + PI / 2.0).abs() < 1e-9);
    assert_eq!(s["type"], 2);
    assert_eq!(s["classification"], "OLS");
    assert!(report["complementary"]["numeric"].as_f64().unwrap().abs() < 1e-2);
}

#[test]
fn audit_type_zero_complementary_is_infinite() {
    let res =
        run(&["audit", "--loop", data("loop_two_channel_type0.json").to_str().unwrap(), "--which", "complementary"]);
    assert_eq!(code(&res), 0);
    let report = stdout_json(&res);
    assert_eq!(report["numeric"], "inf");
    assert_eq!(report["closed_form"], "inf");
    assert_eq!(report["type"], 0);
}

#[test]
fn audit_rhp_zero_loop() {
    let res = run(&["audit", "--loop", data("loop_two_channel_rhp_zero.json").to_str().unwrap(), "--which", "both"]);
    assert_eq!(code(&res), 0);
    let report = stdout_json(&res);
    assert!(report["sensitivity"]["numeric"].as_f64().unwrap().abs() < 2e-2);
    let t = &report["complementary"];
    assert!((t["numeric"].as_f64().unwrap() - 0.1854).abs() < 5e-3);
    assert!((t["closed_form"].as_f64().unwrap() - 0.1854).abs() < 1e-3);
}

#[test]
fn audit_weighted_nmp_integral() {
    let res = run(&["audit", "--loop", data("loop_unstable_pole_rhp_zero.json").to_str().unwrap(), "--which", "nmp:5"]);
    assert_eq!(code(&res), 0);
    let report = stdout_json(&res);
    assert_eq!(report["integral"], "nmp");
    assert!((report["closed_form"].as_f64().unwrap() - PI * 1.5f64.ln()).abs() < 1e-9);
}

#[test]
fn audit_unstable_closed_loop_exits_five() {
    let res = run(&["audit", "--loop", data("loop_unstable_closed.json").to_str().unwrap()]);
    assert_eq!(code(&res), 5);
    let err = stderr_error(&res);
    assert_eq!(err["kind"], "unstable");
    assert_eq!(err["detail"]["poles"][0][0], 1.0);
}

#[test]
fn audit_tolerance_gate_and_environment_override() {
    let path = data("loop_double_integrator_lead.json");
    let res = run(&["audit", "--loop", path.to_str().unwrap(), "--tol", "1e-14"]);
    assert_eq!(code(&res), 1);
    assert_eq!(stderr_error(&res)["kind"], "residual");
    let res = Command::new(env!("CARGO_BIN_EXE_servo-forge"))
        .args(["audit", "--loop", path.to_str().unwrap()])
        .env("SERVO_FORGE_TOL", "1e-14")
        .output()
        .unwrap();
    assert_eq!(code(&res), 1);
}

#[test]
fn unknown_controller_file_is_rejected() {
    let dir = TempDir::new().unwrap();
    let bogus = dir.path().join("c.json");
    std::fs::write(&bogus, r#"{"gain": 1}"#).unwrap();
    let (out, _) = simulate_cli(&bogus, &[], &dir.path().join("t.csv"));
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_error(&out)["kind"], "usage");
}
