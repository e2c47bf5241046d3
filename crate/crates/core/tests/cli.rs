mod support;

use std::process::Command;

use serde_json::Value;
use support::write_toy_scenario;

fn covchain(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_covchain")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn run_verify_risk() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_toy_scenario(dir.path(), 1, 4);
    let out = dir.path().join("out");
    let (code, stdout, stderr) =
        covchain(&["run", "--scenario", scenario.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("2 blocks"), "{stdout}");

    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
    let code_str = summary["trace"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|e| (e["event"] == "mined").then(|| e["winning_code"].as_str().unwrap().to_string()))
        .unwrap();

    let chain = out.join("chain.jsonl");
    let (code, stdout, _) = covchain(&["verify", "--code", &code_str, "--chain", chain.to_str().unwrap()]);
    assert_eq!(code, 0);
    let detail: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(detail["valid"], true);

    let (code, stdout, _) = covchain(&["risk", "--client", "x", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let row: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(row["n_codes"], 2);

    let (code, _, _) = covchain(&["risk", "--client", "nobody", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);

    // A tampered chain file is refused.
    let text = std::fs::read_to_string(&chain).unwrap().replacen("\"c1\"", "\"c9\"", 1);
    std::fs::write(&chain, text).unwrap();
    let (code, _, stderr) = covchain(&["verify", "--code", &code_str, "--chain", chain.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid"), "{stderr}");
}

#[test]
fn usage_errors() {
    assert_eq!(covchain(&[]).0, 1);
    assert_eq!(covchain(&["run"]).0, 1);
    assert_eq!(covchain(&["bogus"]).0, 1);
    assert_eq!(covchain(&["--help"]).0, 0);
    assert_eq!(covchain(&["--version"]).0, 0);
    assert_eq!(covchain(&["run", "--scenario", "/nonexistent.json", "--out", "/tmp/x"]).0, 2);
}
