use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctmtlkit"))
        .args(args)
        .env_remove("CTMTLKIT_SEED")
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ctmtlkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const HEARTBEAT: &str = "G(st -> (C[120,180]>=90 (pulse) & C[120,180]<120 (pulse)))";

#[test]
fn eval_on_a_small_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(dir.path(), "w.trace", "0.3: a, b\n0.7: b\n1.1: a\n");
    let o = run(&["eval", "-e", "a", "--trace", &trace]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "true");

    let o = run(&["--json", "eval", "-e", "F(0,1) !a", "--trace", &trace, "--positions"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["positions"], serde_json::json!([0]));
}

#[test]
fn heartbeat_compiles_to_counter_alphabets() {
    let o = run(&["--json", "compile", "-e", HEARTBEAT]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["base_alphabet"], serde_json::json!(["pulse", "st"]));
    let defs = v["definitions"].as_array().unwrap();
    assert_eq!(defs.len(), 2);
    // One chain modulo 91 and one modulo 121.
    let mut sizes: Vec<usize> = defs.iter().map(|d| d["fresh"].as_array().unwrap().len()).collect();
    sizes.sort();
    assert_eq!(sizes, [91, 121]);
    assert!(defs.iter().all(|d| d["route"] == "C-bounded"));
    assert!(!v["mtl"].as_str().unwrap().contains("C["));
}

#[test]
fn roundtrip_passes_with_a_fixed_seed() {
    let o = run(&["roundtrip", "-e", "C[0,1)>=2 (b)", "--seed", "7", "--cases", "10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("10 cases, 0 failures"));
}

#[test]
fn exit_codes() {
    let o = run(&["parse", "-e", "a U"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[formula.syntax]"));

    let o = run(&["eval", "-e", "a", "--trace", "/nonexistent/trace"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(run(&["fixtures", "--family", "cmtl_vs_tmtl", "--out", d]).status.success());
    let r1 = format!("{d}/cmtl_vs_tmtl.rho1.trace");
    let r2 = format!("{d}/cmtl_vs_tmtl.rho2.trace");
    let o = run(&["game", "solve", "--rho1", &r1, "--rho2", &r2, "-r", "3", "-k", "3", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("game.budget"));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--json", "roundtrip", "--seed", "11", "--cases", "8", "--mutations", "8"];
    let a = run(&args);
    let b = run(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        serde_json::from_str::<Value>(line).unwrap();
    }
}

#[test]
fn fixtures_and_games() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["fixtures", "--out", d]);
    assert!(o.status.success());
    for fam in ["mtl_vs_c01", "c01_vs_c0", "tmtl_vs_cmtl", "cmtl_vs_tmtl"] {
        for ext in ["ctmtl", "rho1.trace", "rho2.trace"] {
            assert!(dir.path().join(format!("{fam}.{ext}")).is_file(), "{fam}.{ext}");
        }
    }

    let r1 = format!("{d}/mtl_vs_c01.rho1.trace");
    let r2 = format!("{d}/mtl_vs_c01.rho2.trace");
    let o = run(&["game", "solve", "--rho1", &r1, "--rho2", &r2, "-r", "2", "-k", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("winner: Spoiler"));

    // The fixture formula itself certifies the win.
    let f = format!("{d}/mtl_vs_c01.ctmtl");
    let o = run(&["--json", "game", "solve", "--rho1", &r1, "--rho2", &r2, "-f", &f]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["consistent"], true);

    // Without counting moves the two words are indistinguishable.
    let o = run(&["game", "solve", "--rho1", &r1, "--rho2", &r2, "-r", "2", "-k", "2", "--fragment", "MTL"]);
    assert!(stdout(&o).contains("winner: Duplicator"));
}

#[test]
fn play_over_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = write(dir.path(), "r1.trace", "0: a\n0.5: b\n");
    let r2 = write(dir.path(), "r2.trace", "0: a\n0.5: a\n");
    // Spoiler jumps to the b on rho1; every reply on rho2 is an a.
    let o = run_with_stdin(
        &["game", "play", "--rho1", &r1, "--rho2", &r2, "-r", "1", "--fragment", "MTL"],
        "until rho1 (0,1) 1\nend\n",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("winner: Spoiler"), "{}", stdout(&o));
}
