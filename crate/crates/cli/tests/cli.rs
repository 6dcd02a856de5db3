use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilepump")).args(args).env_remove("TILEPUMP_BUDGET_MS").output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tilepump-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn analyze_reports_each_outcome_with_exit_zero() {
    for (name, outcome) in [("col-n-tall", "pumpable"), ("fork", "fragile"), ("line-e", "inconclusive")] {
        let out = run(&["analyze", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(stdout_json(&out)["outcome"], outcome, "{name}");
    }
}

#[test]
fn analyze_accepts_limits() {
    let out = run(&["analyze", fixture("line-e").to_str().unwrap(), "--limits", r#"diet={"half_width":2,"half_height":1}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["outcome"], "pumpable");
    let out = run(&["analyze", fixture("line-e").to_str().unwrap(), "--limits", "max_steps"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pump_visibility_and_uturn() {
    let out = run(&["pump", fixture("hook-s").to_str().unwrap(), "--i", "3", "--j", "4"]);
    let v = stdout_json(&out);
    assert_eq!(v["outcome"], "conflict");
    assert_eq!(v["detail"]["point"], serde_json::json!({ "x": 1, "y": 0 }));
    assert_eq!(v["detail"]["against"], "obstacle");

    let out = run(&["visibility", fixture("col-n").to_str().unwrap(), "--side", "east"]);
    assert_eq!(stdout_json(&out)["overlays"]["rays"].as_array().unwrap().len(), 4);

    let out = run(&["uturn", fixture("nshape").to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["detail"]["uturn"], serde_json::json!({ "i": 1, "j": 2, "k": 12 }));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["pump", fixture("hook-s").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["pump", fixture("hook-s").to_str().unwrap(), "--i", "4", "--j", "3"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "/nonexistent/instance.json"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_instances_exit_two() {
    let text = std::fs::read_to_string(fixture("line-e")).unwrap().replacen("\"tile\": \"t\"", "\"tile\": \"zz\"", 1);
    let out = run(&["analyze", temp("bad.json", &text).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "unknown_tile");
    let out = run(&["analyze", temp("broken.json", "{").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_tilepump"))
        .args(["analyze", fixture("col-n-tall").to_str().unwrap()])
        .env("TILEPUMP_BUDGET_MS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn render_writes_svg() {
    let target = std::env::temp_dir().join(format!("tilepump-render-{}.svg", std::process::id()));
    let out = run(&[
        "render",
        fixture("hook-s").to_str().unwrap(),
        "-o",
        target.to_str().unwrap(),
        "--overlay",
        "pump:3,4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&target).unwrap();
    assert!(svg.contains(r#"class="conflict" data-x="1" data-y="0""#));
    let out = run(&["render", fixture("hook-s").to_str().unwrap(), "-o", target.to_str().unwrap(), "--overlay", "sparkles"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_round_trips_certificates() {
    let out = run(&["analyze", fixture("fork").to_str().unwrap()]);
    let cert = stdout_json(&out)["certificates"][0].to_string();
    let path = temp("fork-cert.json", &cert);
    let out = run(&["verify", fixture("fork").to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "accepted");
    let out = run(&["verify", fixture("line-e").to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["verdict"], "rejected");
    let out = run(&["verify", fixture("fork").to_str().unwrap(), temp("junk.json", "[]").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_are_printed_exactly() {
    let out = run(&["bounds", "--tiles", "2", "--seed-size", "1"]);
    let v = stdout_json(&out);
    let b_seed = v.as_array().unwrap().iter().find(|e| e["name"] == "B_seed").unwrap();
    assert_eq!(b_seed["value"], "5");
}
