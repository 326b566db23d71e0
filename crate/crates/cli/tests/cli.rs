use std::process::{Command, Output};

fn dqhkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqhkr")).args(args).output().expect("run dqhkr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn hkr_example_table() {
    let o = dqhkr(&["hkr", "--m", "2", "--k", "1", "--n", "2", "--d", "1", "--o", "1", "--module", "diffop"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for (deg, dim) in [(0, "6"), (1, "6"), (2, "0")] {
        let row = text.lines().find(|l| l.trim_start().starts_with(&format!("H^{deg} "))).unwrap();
        let cells: Vec<&str> = row.split('|').map(str::trim).collect();
        assert_eq!(cells[1..], [dim, dim, "yes"], "{row}");
    }
}

#[test]
fn chainmaps_example_passes() {
    let o = dqhkr(&["chainmaps", "--m", "2", "--degree", "2", "--samples", "50", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("checks, 0 failed\n"));
}

#[test]
fn assoc_example_writes_json() {
    let path = std::env::temp_dir().join(format!("dqhkr-assoc-{}.json", std::process::id()));
    let o = dqhkr(&["assoc", "--A", "0 1; 0 0", "--order", "3", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["schema"], "dqhkr-report/1");
    assert_eq!(v["command"], "assoc");
    assert_eq!(v["seed"], 1);
    assert_eq!(v["params"]["order"], 3);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "associativity defect at order 3"));
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn invalid_parameters_exit_with_usage() {
    for args in [
        &["hkr", "--m", "2", "--k", "3"][..],
        &["hkr", "--module", "tensors"],
        &["assoc", "--A", "0 1; 0"],
        &["chainmaps", "--m", "0"],
        &["obstruction", "--order", "0"],
        &["hkr", "--m", "3", "--n", "6", "--d", "6", "--o", "6", "--budget", "100"],
        &["frobnicate"],
    ] {
        let o = dqhkr(args);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn config_file_overrides_flags() {
    let path = std::env::temp_dir().join(format!("dqhkr-config-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"m": 1, "degree": 1, "samples": 5}"#).unwrap();
    let o = dqhkr(&["chainmaps", "--m", "3", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("degree 2"));
    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    let o = dqhkr(&["chainmaps", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}
