use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_burgers-bench"))
}

#[test]
fn single_run_prints_csv() {
    let out = bench()
        .args([
            "--grid",
            "7",
            "--iters",
            "2",
            "--reps",
            "1",
            "--mode",
            "real",
            "--tape",
            "primal-reuse",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("mode,tape,grid,iters,"));
    assert!(lines.next().unwrap().starts_with("real,primal-reuse,7,2,"));
}

#[test]
fn matrix_writes_json_file() {
    let dir = std::env::temp_dir().join(format!("burgers-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let status = bench()
        .args([
            "--grid",
            "5",
            "--iters",
            "1",
            "--reps",
            "1",
            "--matrix",
            "--output",
            "json",
            "--seed-check",
        ])
        .arg("--out-file")
        .arg(&path)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 12);
    assert_eq!(json["memory_factors"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_configuration_exits_with_two() {
    let grid = bench().args(["--grid", "2"]).output().unwrap().status;
    assert_eq!(grid.code(), Some(2));
    let mode = bench()
        .args(["--mode", "quaternion"])
        .output()
        .unwrap()
        .status;
    assert_eq!(mode.code(), Some(2));
}
