use std::fs;
use std::process::{Command, Output};

fn epp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decoder_table_for_each_code() {
    for (code, rows) in [("repetition3", 4), ("five13", 16), ("surface3", 256)] {
        let out = epp(&["decoder-table", "--code", code]);
        assert!(out.status.success());
        let text = stdout(&out);
        let body = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(body, rows + 1, "{code}");
    }
}

#[test]
fn oracle_verify_small() {
    let out = epp(&["oracle-verify", "--max-n", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains(" 0 fail"), "{text}");
}

#[test]
fn bounds_prints_both_success_forms() {
    let out = epp(&["bounds", "--delta", "0.02", "--k", "20000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[consistent]") && text.contains("0.4728"));
    assert!(text.contains("[as printed]") && text.contains("0.8610"));
}

#[test]
fn bounds_reports_saturation() {
    let out = epp(&["bounds", "--delta", "0.02", "--k", "20000", "--gate-factor", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Bob must abort"));
}

#[test]
fn run_prints_transcript_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "code = \"five13\"\nn = 500\nattack = \"fixed_budget\"\ngates = 3\naction = \"meas_x\"\n").unwrap();
    let out = epp(&["run", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("decision"));
    let record: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    for key in ["seed", "omega_hat", "delta", "epsilon_qu", "est_gates", "accepted", "true_weight", "logical_effect"] {
        assert!(record.get(key).is_some(), "{key}");
    }
}

#[test]
fn mc_writes_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "n = 300\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = epp(&["mc", "--config", cfg.to_str().unwrap(), "--trials", "20", "--format", "text", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out_dir.join("summary.txt").exists());
    assert!(stdout(&out).contains("accepted          20"));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "n = 300\nunknown_key = 1\n").unwrap();
    let out = epp(&["mc", "--config", cfg.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown_key"));

    assert!(!epp(&["decoder-table", "--code", "steane"]).status.success());
    assert!(!epp(&["bounds", "--delta", "-1", "--k", "10"]).status.success());
    assert!(!epp(&["run", "--config", "/nonexistent/cfg.toml"]).status.success());
}
