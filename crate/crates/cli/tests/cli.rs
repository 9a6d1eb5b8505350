//! End-to-end checks of the binary: exit codes, report shape, determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pdcohom"))
}

fn write_job(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn derham_job_succeeds() {
    let dir = std::env::temp_dir().join("pdcohom-cli-derham");
    std::fs::create_dir_all(&dir).unwrap();
    let job = write_job(
        &dir,
        "derham.json",
        r#"{"command":"derham","ring":"Q","vars":1,"D":6}"#,
    );
    let out = bin().arg("run").arg(&job).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("--- table: derham_cohomology"));
    assert!(stdout.contains("content_hash: sha256:"));
}

#[test]
fn failing_probe_exits_one() {
    let dir = std::env::temp_dir().join("pdcohom-cli-probe");
    std::fs::create_dir_all(&dir).unwrap();
    let job = write_job(
        &dir,
        "probe.json",
        r#"{"command":"probe","ring":"Q","vars":1,"gens":["x0","x0"],"mode":"groebner","D":2}"#,
    );
    let out = bin().arg("run").arg(&job).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("witness"));
}

#[test]
fn invalid_job_exits_two_with_all_errors() {
    let dir = std::env::temp_dir().join("pdcohom-cli-invalid");
    std::fs::create_dir_all(&dir).unwrap();
    let job = write_job(&dir, "bad.json", r#"{"command":"cech","ring":"nope","M":0}"#);
    let out = bin().arg("run").arg(&job).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("'ring'"));
    assert!(stderr.contains("'M'"));
    assert!(stderr.contains("'N'"));
}

#[test]
fn missing_file_exits_two() {
    let out = bin().arg("run").arg("/nonexistent/job.json").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic_across_threads() {
    let mut hashes = Vec::new();
    for threads in ["1", "8"] {
        let out = bin()
            .args(["selftest", "--seed", "42", "--threads", threads])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let stdout = String::from_utf8_lossy(&out.stdout);
        let hash = stdout
            .lines()
            .find(|l| l.starts_with("content_hash:"))
            .unwrap()
            .to_string();
        hashes.push(hash);
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn out_dir_receives_report() {
    let dir = std::env::temp_dir().join("pdcohom-cli-out");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let job = write_job(
        &dir,
        "modp.json",
        r#"{"command":"compare-modp","p":3,"precision":2,"vars":1,"D":9,"out":"modp-report.txt"}"#,
    );
    let out = bin()
        .arg("run")
        .arg(&job)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.join("modp-report.txt")).unwrap();
    assert!(written.contains("mod_p_comparison"));
}
