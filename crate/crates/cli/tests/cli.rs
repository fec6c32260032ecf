use std::path::Path;
use std::process::{Command, Output};

fn nlhide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlhide"))
        .args(args)
        .env_remove("NLHIDE_DIM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_example(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path = path.to_str().unwrap().to_string();
    let mut full = vec!["example"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let o = nlhide(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn example_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "e1.json", &["--kind", "1", "--d", "2", "--m", "2"]);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(doc["probs"], serde_json::json!(["0.75", "0.25"]));

    let p = write_example(
        dir.path(),
        "e2.json",
        &["--kind", "2", "--d", "2", "--m", "2", "--s", "2", "--t", "2"],
    );
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(doc["states"].as_array().unwrap().len(), 4);
    assert_eq!(doc["states"][0].as_array().unwrap().len(), 256);

    assert_eq!(
        nlhide(&["example", "--kind", "1", "--d", "1", "--m", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nlhide(&["example", "--kind", "2", "--d", "2", "--m", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dimension_cap() {
    let o = nlhide(&["example", "--kind", "1", "--d", "2", "--m", "13"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4096"));

    let o = Command::new(env!("CARGO_BIN_EXE_nlhide"))
        .args(["example", "--kind", "1", "--d", "2", "--m", "3"])
        .env("NLHIDE_DIM_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_example(dir.path(), "e1.json", &["--kind", "1", "--d", "2", "--m", "2"]);
    let o = nlhide(&["check", "-i", &e1]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("status,admissible"));
    assert!(out.contains("q[A1|A2],0.75000000000000000"));

    let e2 = write_example(
        dir.path(),
        "e2.json",
        &["--kind", "2", "--d", "2", "--m", "2", "--s", "1", "--t", "2"],
    );
    let o = nlhide(&["check", "-i", &e2]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("0.5 >= 2^(1/t) - 1"));

    let text = std::fs::read_to_string(&e1).unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, &text[..text.len() / 3]).unwrap();
    assert_eq!(
        nlhide(&["check", "-i", broken.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let o = nlhide(&["check", "-i", &e1, "--format", "json"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "admissible");
    assert_eq!(report["min_folds"], 19);
}

#[test]
fn bounds_table() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_example(dir.path(), "e1.json", &["--kind", "1", "--d", "2", "--m", "2"]);
    let o = nlhide(&["bounds", "-i", &e1, "--lmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let want = [0.75, 0.625, 0.5625, 0.53125];
    for (r, w) in rows.iter().zip(want) {
        assert_eq!(r[1], w);
        assert_eq!(r[2], w);
    }
    assert_eq!(nlhide(&["bounds", "-i", &e1, "--lmax", "0"]).status.code(), Some(2));

    let e2 = write_example(
        dir.path(),
        "e2.json",
        &["--kind", "2", "--d", "2", "--m", "2", "--s", "1", "--t", "2"],
    );
    assert_eq!(nlhide(&["bounds", "-i", &e2, "--lmax", "3"]).status.code(), Some(1));
    assert_eq!(
        nlhide(&["bounds", "-i", &e2, "--lmax", "3", "--force"]).status.code(),
        Some(0)
    );
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_example(dir.path(), "e1.json", &["--kind", "1", "--d", "2", "--m", "2"]);
    let run = |name: &str| {
        let t = dir.path().join(name);
        let o = nlhide(&[
            "simulate",
            "-i",
            &e1,
            "--L",
            "3",
            "--x",
            "1",
            "--trials",
            "10000",
            "--seed",
            "42",
            "--transcripts",
            t.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (stdout(&o), std::fs::read(t).unwrap())
    };
    let (s1, t1) = run("a.jsonl");
    let (s2, t2) = run("b.jsonl");
    assert_eq!(s1, s2);
    assert_eq!(t1, t2);
    assert!(s1.contains("recovery_rate,1.0000000000000000"));
    assert_eq!(t1.iter().filter(|&&b| b == b'\n').count(), 10_000);

    let o = nlhide(&["simulate", "-i", &e1, "--L", "3", "--x", "5", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(2));

    let o = nlhide(&["simulate", "-i", &e1, "--L", "2", "--x", "1", "--direct"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recovery_ok,true"));
}

#[test]
fn fold_and_coalition() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_example(dir.path(), "e1.json", &["--kind", "1", "--d", "2", "--m", "3"]);
    let folded = dir.path().join("f.json");
    let o = nlhide(&["fold", "-i", &e1, "--L", "2", "-o", folded.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&folded).unwrap()).unwrap();
    assert_eq!(doc["party_of_slot"], serde_json::json!([0, 1, 2, 0, 1, 2]));
    assert_eq!(doc["probs"], serde_json::json!(["0.78125", "0.21875"]));
    assert_eq!(nlhide(&["fold", "-i", &e1, "--L", "5"]).status.code(), Some(3));

    let o = nlhide(&["coalition", "-i", &e1, "--L", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("partition,L,bound_or_exact,kind\n"));
    assert!(out.contains("A1|A2|A3,2,0.78125000000000000,exact"));
    assert_eq!(out.lines().count(), 5);
}
