use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const W4: &str = "4\n0 10 1 1\n10 0 1 1\n1 1 0 10\n1 1 10 0\n";
const T3: &str = "3\n0 5 2\n5 0 4\n2 4 0\n";

fn derange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derange"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn improve_w4_to_certified_optimum() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "w4.txt", W4);
    let trace = dir.path().join("trace.jsonl");
    let o = derange(&[
        "improve",
        "--matrix",
        m.to_str().unwrap(),
        "--derangement",
        "2 1 4 3",
        "--oracle-check",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let human = stdout(&o);
    assert!(human.contains("C_1 = (1 3 2 4)  weight -36"), "{human}");
    assert!(human.contains("final cost 4, status oracle-certified-optimal"), "{human}");

    let lines: Vec<serde_json::Value> = fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["cost"], 40);
    assert_eq!(lines[0]["weight"], -36);
    assert_eq!(lines[1]["derangement"], "4 3 1 2");
    let summary = &lines[2];
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["final_cost"], 4);
    assert_eq!(summary["steps"], 1);
    assert_eq!(summary["status"], "oracle-certified-optimal");
    assert_eq!(summary["oracle_optimum"], 4);
}

#[test]
fn derived_dump_marks_forbidden_entries() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "t3.txt", T3);
    let o = derange(&["derived", "--matrix", m.to_str().unwrap(), "--derangement", "(1 2 3)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3\nx -3 x\nx x 1\n2 x x\n");
}

#[test]
fn verify_accepts_own_trace_and_rejects_tampering() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "w4.txt", W4);
    let o = derange(&[
        "improve",
        "--matrix",
        m.to_str().unwrap(),
        "--derangement",
        "2 1 4 3",
        "--machine",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let good = write(dir.path(), "good.jsonl", &stdout(&o));
    let v = derange(&["verify", "--matrix", m.to_str().unwrap(), "--trace", good.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v), "ok: 1 steps, final cost 4\n");

    let tampered = stdout(&o).replacen("\"cost\":40", "\"cost\":39", 1);
    let bad = write(dir.path(), "bad.jsonl", &tampered);
    let v = derange(&["verify", "--matrix", m.to_str().unwrap(), "--trace", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));

    let garbage = write(dir.path(), "garbage.jsonl", "{not json\n");
    let v = derange(&["verify", "--matrix", m.to_str().unwrap(), "--trace", garbage.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn gen_output_loads_and_re_emits_identically() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.txt");
    let o = derange(&["gen", "--n", "9", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let m = derangement::CostMatrix::parse(&text).unwrap();
    assert_eq!(m.n(), 9);
    assert_eq!(m.to_text(), text);

    let again = derange(&["gen", "--n", "9", "--seed", "42"]);
    assert_eq!(stdout(&again), text);
    let negative = derange(&["gen", "--n", "5", "--min", "-3", "--max", "-1"]);
    assert_eq!(negative.status.code(), Some(0));
}

#[test]
fn bad_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let asym = write(dir.path(), "asym.txt", "3\n0 1 2\n9 0 3\n2 3 0\n");
    let o = derange(&["derived", "--matrix", asym.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("symmetric"));

    let m = write(dir.path(), "w4.txt", W4);
    let o = derange(&["improve", "--matrix", m.to_str().unwrap(), "--derangement", "1 2 3 4"]);
    assert_eq!(o.status.code(), Some(1));
    let o = derange(&["improve", "--matrix", m.to_str().unwrap(), "--derangement", "2 1 4 3", "--mode", "two-factor"]);
    assert_eq!(o.status.code(), Some(1));
    let o = derange(&["derived", "--matrix", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_min_and_negcycle_report() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "w4.txt", W4);
    let o = derange(&["oracle-min", "--matrix", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("min assignment derangement: 4  witness (1 3)(2 4)  examined 9"), "{text}");
    assert!(text.contains("min tour: 4"), "{text}");

    let o = derange(&["negcycle", "--matrix", m.to_str().unwrap(), "--derangement", "2 1 4 3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("I. attempted"), "{text}");
    assert!(text.contains("cycle (1 3 2 4)  weight -36"), "{text}");

    let t3 = write(dir.path(), "t3.txt", T3);
    let o = derange(&["negcycle", "--matrix", t3.to_str().unwrap()]);
    assert!(stdout(&o).contains("no admissible negative cycle"));
    let o = derange(&["negcycle", "--matrix", t3.to_str().unwrap(), "--source", "7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn machine_trace_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    derange(&["gen", "--n", "10", "--seed", "3", "--out", g.to_str().unwrap()]);
    let run = || stdout(&derange(&["improve", "--matrix", g.to_str().unwrap(), "--machine"]));
    let first = run();
    assert!(first.ends_with("\n"));
    assert_eq!(first, run());
}
