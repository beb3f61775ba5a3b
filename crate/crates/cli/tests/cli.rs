use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SEEDS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/seeds.kb");

fn derivekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derivekit"))
        .args(args)
        .env_remove("DERIVEKIT_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn walk(dir: &Path, name: &str, length: usize, rng: u64) -> PathBuf {
    let out = dir.join(name);
    let o = derivekit(&[
        "generate",
        "--seed-eqs",
        SEEDS,
        "--length",
        &length.to_string(),
        "--branch-p",
        "0.2",
        "--rng",
        &rng.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    out
}

#[test]
fn metrics_prints_the_distance() {
    let o = derivekit(&["metrics", "--a", "abc", "--b", "", "--measure", "levenshtein"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3\n");
    let all = stdout(&derivekit(&["metrics", "--a", "ab", "--b", "ba"]));
    let names: Vec<&str> = all.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(names, ["levenshtein", "damerau", "osa", "hamming", "jaro", "jaro-winkler"]);
    assert!(all.contains("damerau\t1\n") && all.contains("osa\t1\n") && all.contains("levenshtein\t2\n"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(derivekit(&["metrics", "--a", "x", "--b", "y", "--bogus"]).status.code(), Some(1));
    assert_eq!(derivekit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(derivekit(&["metrics", "--a", "x", "--b", "y", "--measure", "cosine"]).status.code(), Some(1));
    let o = derivekit(&["metrics", "--a", "x", "--b", "y", "--measure", "jaro-winkler", "--jw-p", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(derivekit(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two_and_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.tsv");
    let o = derivekit(&["dataset", "stats", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.tsv"));

    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "a\tb\n1\t2\n").unwrap();
    let o = derivekit(&["dataset", "validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.tsv") && stderr(&o).contains("line 1"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn generate_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let a = walk(dir.path(), "a.tsv", 15, 42);
    let b = walk(dir.path(), "b.tsv", 15, 42);
    let c = walk(dir.path(), "c.tsv", 15, 43);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    let o = derivekit(&["dataset", "validate", "--replay", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("\"valid\":true"));

    let stats: serde_json::Value =
        serde_json::from_str(&stdout(&derivekit(&["dataset", "stats", a.to_str().unwrap()]))).unwrap();
    assert_eq!(stats["records"], 15);
    assert_eq!(stats["padded_states"], 17);
}

#[test]
fn validate_reports_a_wrong_role_column() {
    let dir = tempfile::tempdir().unwrap();
    let a = walk(dir.path(), "a.tsv", 8, 3);
    let text = std::fs::read_to_string(&a).unwrap();
    let tampered = text.replacen("\tintegrative\t", "\tterminal\t", 1);
    std::fs::write(&a, tampered).unwrap();
    let o = derivekit(&["dataset", "validate", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("\"record\":1"), "{}", stdout(&o));
}

#[test]
fn evaluate_json_is_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = walk(dir.path(), "a.tsv", 20, 9);
    let run = |jobs: &str, measure: &str| {
        let o = derivekit(&[
            "--jobs",
            jobs,
            "evaluate",
            "--dataset",
            a.to_str().unwrap(),
            "--kb",
            SEEDS,
            "--measure",
            measure,
            "--eta",
            "0",
            "--report",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o.stdout
    };
    for measure in ["damerau", "jaro-winkler"] {
        let one = run("1", measure);
        assert_eq!(one, run("8", measure));
        assert_eq!(one, run("1", measure));
        assert_eq!(one.iter().filter(|b| **b == b'\n').count(), 1);
        let report: serde_json::Value = serde_json::from_slice(&one).unwrap();
        assert_eq!(report["total"], 20);
    }
}

#[test]
fn jobs_default_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = walk(dir.path(), "a.tsv", 6, 1);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_derivekit"));
    let o = cmd
        .args(["evaluate", "--dataset", a.to_str().unwrap(), "--report", "json"])
        .env("DERIVEKIT_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_derivekit"))
        .args(["evaluate", "--dataset", a.to_str().unwrap()])
        .env("DERIVEKIT_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nmeasure = hamming\njw_p = 0.2\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(stdout(&derivekit(&["--config", c, "metrics", "--a", "abcd", "--b", "ab"])), "2\n");
    // the command line wins
    let o = derivekit(&["--config", c, "metrics", "--a", "ab", "--b", "ba", "--measure", "damerau"]);
    assert_eq!(stdout(&o), "1\n");

    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    assert_eq!(derivekit(&["--config", c, "metrics", "--a", "a", "--b", "b"]).status.code(), Some(1));
    std::fs::write(&cfg, "no equals sign\n").unwrap();
    assert_eq!(derivekit(&["--config", c, "metrics", "--a", "a", "--b", "b"]).status.code(), Some(1));
}

#[test]
fn reconstruct_emits_one_line_per_unit() {
    let dir = tempfile::tempdir().unwrap();
    let a = walk(dir.path(), "a.tsv", 7, 5);
    let path = a.to_str().unwrap();
    let o = derivekit(&["reconstruct", "--dataset", path, "--kb", SEEDS]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["unit"], i + 1);
        assert_eq!(l["reconstruction"]["path"]["distance"], 0.0);
    }
    let one = derivekit(&["reconstruct", "--dataset", path, "--kb", SEEDS, "--unit", "3", "--n1", "5"]);
    assert_eq!(stdout(&one).lines().count(), 1);
    assert_eq!(derivekit(&["reconstruct", "--dataset", path, "--unit", "8"]).status.code(), Some(1));
    assert_eq!(derivekit(&["reconstruct", "--dataset", path, "--unit", "0"]).status.code(), Some(1));
}

#[test]
fn actions_list_names_every_builtin_action() {
    let o = derivekit(&["actions", "list", "--report", "json"]);
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().any(|r| r["name"] == "consider_kb_equation"));
    let table = stdout(&derivekit(&["actions", "list"]));
    assert_eq!(table.lines().count(), 18);
}
