use std::path::PathBuf;
use std::process::{Command, Output};

fn scalvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scalvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scalvar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn list_names_every_entry() {
    let out = scalvar(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for id in ["group-su2", "group-spn", "group-sun", "symmetric-sphere", "wallach-so"] {
        assert!(text.contains(id), "{id} missing from list");
    }
    let json: serde_json::Value = serde_json::from_slice(&scalvar(&["list", "--json"]).stdout).unwrap();
    assert!(json.as_array().unwrap().len() >= 9);
}

#[test]
fn analyze_text_and_json() {
    let out = scalvar(&["analyze", "group-su2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("LocalMax"));

    let first = scalvar(&["analyze", "group-spn", "--n", "2", "--json"]);
    let second = scalvar(&["analyze", "group-spn", "--n", "2", "--json"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "JSON output must be byte-stable");
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["verdict"]["kind"], "Saddle");
    assert_eq!(report["two_block"]["t"], 10.0);
    assert_eq!(report["dims"], serde_json::json!([3, 7]));
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(code(&scalvar(&["analyze", "no-such-space"])), 2);
    assert_eq!(code(&scalvar(&["analyze", "group-spn", "--n", "40"])), 2);
    assert_eq!(code(&scalvar(&["analyze", "group-torus-witness", "--group", "g2"])), 2);
    assert_eq!(code(&scalvar(&["analyze"])), 2);
}

#[test]
fn file_errors_exit_with_four() {
    assert_eq!(code(&scalvar(&["analyze", "--file", "/nonexistent/space.txt"])), 4);
    let bad = temp_file("bad.space", "algebra su 2\nwhat 1\n");
    let out = scalvar(&["analyze", "--file", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn non_einstein_needs_force() {
    let squashed = temp_file("squashed.space", "# Berger sphere\nalgebra su 2\nblock 0\nblock 1 2\nscales 2 1\n");
    let path = squashed.to_str().unwrap();
    assert_eq!(code(&scalvar(&["analyze", "--file", path])), 3);
    let forced = scalvar(&["analyze", "--blocks", path, "--force"]);
    assert_eq!(code(&forced), 0);
    assert!(stdout(&forced).contains("not Einstein"));
}

#[test]
fn scan_writes_csv_and_rejects_bad_steps() {
    let out = scalvar(&["scan", "group-sun", "--preset", "jensen", "--from", "-0.2", "--to", "0.2", "--step", "0.1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,S,dS,d2S");
    assert_eq!(lines.len(), 6);
    assert!(lines[3].starts_with("0,2,"), "{}", lines[3]);

    let json = scalvar(&["scan", "group-su2", "--direction", "2,-1,-1", "--to", "0", "--step", "0.5", "--json"]);
    let rows: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);

    assert_eq!(code(&scalvar(&["scan", "group-su2", "--preset", "stretch", "--step", "0"])), 2);
    assert_eq!(code(&scalvar(&["scan", "group-su2", "--direction", "1,2"])), 2);
    assert_eq!(code(&scalvar(&["scan", "group-su2", "--preset", "jensen"])), 2);
}

#[test]
fn verify_passes_and_detects_perturbation() {
    let out = scalvar(&["verify", "group-su2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));

    let broken = scalvar(&["verify", "group-spn", "--n", "2", "--perturb", "0,1,2,0.01"]);
    assert_eq!(code(&broken), 2);
    let text = stdout(&broken);
    assert!(text.contains("FAIL jacobi residual"), "{text}");
}
