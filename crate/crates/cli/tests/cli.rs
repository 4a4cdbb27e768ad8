use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn symteam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symteam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_taxi_identical(dir: &Path) -> String {
    let path = dir.join("taxi.json");
    let game = symteam_core::fixtures::taxi_identical();
    std::fs::write(&path, serde_json::to_string(&game).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_two_by_two_random_game() {
    let dir = tempfile::tempdir().unwrap();
    let out = symteam(&[
        "generate",
        "--class",
        "random",
        "--players",
        "2",
        "--actions",
        "2",
        "--seed",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let v = json_stdout(&out);
    let payoffs: Vec<f64> = v["payoffs"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(payoffs.len(), 4);
    assert_eq!(payoffs[1], payoffs[2]);
    assert!(payoffs.iter().all(|u| (-100.0..=100.0).contains(u)));

    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("game.json")).unwrap()).unwrap();
    assert_eq!(written, v);
    let again = json_stdout(&symteam(&["generate", "--class", "random", "--players", "2", "--actions", "2", "--seed", "3"]));
    assert_eq!(again, v);
}

#[test]
fn analyze_reports_taxi_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_taxi_identical(dir.path());
    let v = json_stdout(&symteam(&["analyze", "--game", &game, "--strategies", "0.5,0.5;0.5,0.5"]));
    assert_eq!(v["expected_utility"][0].as_f64(), Some(1.5));
    assert_eq!(v["exploitability"].as_f64(), Some(0.0));
    assert_eq!(v["is_nash"], true);
    assert_eq!(v["is_mixed"], true);
    assert_eq!(v["is_degenerate"], false);
    assert_eq!(v["asym_locally_optimal"], "unstable");
}

#[test]
fn analyze_rejects_off_simplex_input() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_taxi_identical(dir.path());
    let out = symteam(&["analyze", "--game", &game, "--strategies", "0.7,0.7;0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_finds_taxi_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_taxi_identical(dir.path());
    let v = json_stdout(&symteam(&["optimize", "--game", &game, "--runs", "3", "--seed", "5"]));
    let eu = v["best"]["expected_utility"].as_f64().unwrap();
    assert!((eu - 1.5).abs() < 1e-9, "{eu}");
    assert_eq!(v["runs"].as_array().unwrap().len(), 6);
}

#[test]
fn symmetries_of_a_generated_game() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    json_stdout(&symteam(&["generate", "--class", "coordination", "--players", "3", "--actions", "2", "--out", d]));
    let game = dir.path().join("game.json");
    let v = json_stdout(&symteam(&["symmetries", "--game", game.to_str().unwrap()]));
    assert_eq!(v["order"], 6);
    assert_eq!(v["full_symmetric_group"], true);
}

#[test]
fn fixtures_pass() {
    let out = symteam(&["fixtures"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(text.lines().count() > 20);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(symteam(&["--bogus"]).status.code(), Some(2));
    assert_eq!(symteam(&["generate", "--class", "prisoners", "--players", "2", "--actions", "2"]).status.code(), Some(2));
    assert_eq!(symteam(&["analyze", "--game", "/nonexistent/game.json", "--strategies", "1,0;1,0"]).status.code(), Some(2));
}

#[test]
fn small_sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = symteam(&[
        "sweep",
        "--games-per-cell",
        "3",
        "--players",
        "2..3",
        "--actions",
        "2..2",
        "--classes",
        "random,coordination",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells = std::fs::read_to_string(dir.path().join("cells.csv")).unwrap();
    assert_eq!(cells.as_bytes(), out.stdout.as_slice());
    assert_eq!(cells.lines().count(), 1 + 4);
    assert_eq!(cells.lines().next(), Some(symteam_core::harness::sweep::CELLS_HEADER));
    assert!(dir.path().join("summary.md").exists());
}
