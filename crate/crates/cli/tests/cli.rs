use std::path::Path;
use std::process::{Command, Output};

fn zetalab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab")).args(args).env("ZETALAB_CACHE", cache).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SUBCOMMANDS: [&str; 8] =
    ["generate", "ingest", "featurize", "census", "train", "evaluate", "experiment", "report"];

#[test]
fn generate_lists_discriminants() {
    let dir = tempfile::tempdir().unwrap();
    let o = zetalab(&["generate", "--quadratic", "--range", "1:40"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["5", "8", "12", "13", "17", "21", "24", "28", "29", "33", "37", "40"]);
    let o = zetalab(&["generate", "--quadratic", "--range", "-24:-19", "--class-numbers"], dir.path());
    assert_eq!(stdout(&o), "-24,2\n-23,3\n-20,2\n-19,1\n");
}

#[test]
fn census_small_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = zetalab(&["census", "--max-disc", "40", "--class-numbers", "1,2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("h=1: 11\nh=2: 1\n"), "{}", stdout(&o));
    let o = zetalab(&["census", "--range", "1:40", "--class-numbers", "1", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["1"], 11);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = zetalab(&["frobnicate"], dir.path());
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(stderr(&unknown).lines().count(), 1);
    assert!(stderr(&unknown).starts_with("error: usage:"));

    let bad_flag = zetalab(&["census", "--max-disc", "40", "--bogus"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(1));

    let bad_range = zetalab(&["generate", "--quadratic", "--range", "9:3"], dir.path());
    assert_eq!(bad_range.status.code(), Some(1));

    let missing = zetalab(&["featurize", "--input", "/no/such/file.csv", "--encoding", "zeta"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(stderr(&missing).lines().count(), 1);
    assert!(stderr(&missing).starts_with("error: data:"));

    let unknown_exp = zetalab(&["experiment", "--name", "nope"], dir.path());
    assert_eq!(unknown_exp.status.code(), Some(1));

    let bad_snapshot = dir.path().join("bad.csv");
    std::fs::write(&bad_snapshot, "label,degree,r1,r2,discriminant,galois,class_number,poly\nx,2,1,1,5,C2,1,-1 -1 1\n")
        .unwrap();
    let o = zetalab(
        &["ingest", "--input", bad_snapshot.to_str().unwrap(), "--out", dir.path().join("o.csv").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn help_lists_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let readme = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let top = stdout(&zetalab(&["--help"], dir.path()));
    for sub in SUBCOMMANDS {
        assert!(top.contains(sub), "top-level help misses {sub}");
        assert!(readme.contains(&format!("zetalab {sub}")), "README misses {sub}");
        let help = zetalab(&[sub, "--help"], dir.path());
        assert!(help.status.success());
        let text = stdout(&help);
        for flag in ["--seed", "--jobs", "--cache-dir"] {
            assert!(text.contains(flag), "{sub} help misses {flag}");
        }
        for line in text.lines() {
            let Some(pos) = line.find("--") else { continue };
            let flag: String = line[pos..].chars().take_while(|c| *c == '-' || c.is_ascii_alphanumeric()).collect();
            if flag.len() > 2 && flag != "--help" && flag != "--version" {
                assert!(readme.contains(&flag), "README does not document {flag} ({sub})");
            }
        }
    }
}

#[test]
fn featurize_snapshot_and_range() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("q.csv");
    let o = zetalab(&["generate", "--quadratic", "--range", "-20:13", "--out", snap.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let ingest_out = dir.path().join("q2.csv");
    let o = zetalab(&["ingest", "--input", snap.to_str().unwrap(), "--out", ingest_out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&snap).unwrap(), std::fs::read_to_string(&ingest_out).unwrap());

    let o =
        zetalab(&["featurize", "--input", snap.to_str().unwrap(), "--encoding", "zeta", "--length", "10"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let qi = text.lines().find(|l| l.starts_with("2.0.4.1,")).unwrap();
    assert_eq!(qi, "2.0.4.1,,1,1,0,1,2,0,0,1,1,2");

    let o = zetalab(&["featurize", "--range", "5:5", "--encoding", "split", "--length", "5"], dir.path());
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "2.2.5.1,,0,0,0,0,1");
    let o = zetalab(&["featurize", "--range", "5:5", "--encoding", "poly"], dir.path());
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "2.2.5.1,,-1,-1");
}

const SMALL_CONFIG: &str = r#"
[experiments.tiny]
source = { kind = "quadratic", min_disc = 5, max_disc = 20000 }
invariant = "class_number"
classes = ["1", "2"]
encodings = ["zeta"]
zeta_length = 100
forest = { num_trees = 10 }

[[experiments.tiny.extrapolation]]
label = "next"
min_disc = 20001
max_disc = 25000

[[experiments.tiny.references]]
min_precision = 0.5

[experiments.gated]
source = { kind = "snapshot", path = "missing.csv" }
invariant = "degree"
encodings = ["zeta"]
"#;

#[test]
fn experiment_train_evaluate_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, SMALL_CONFIG).unwrap();
    let runs = dir.path().join("runs");
    let cfg_s = cfg.to_str().unwrap();
    let runs_s = runs.to_str().unwrap();

    let args = [
        "experiment",
        "--config",
        cfg_s,
        "--all",
        "--out-dir",
        runs_s,
        "--seed",
        "4",
        "--jobs",
        "1",
        "--format",
        "csv",
    ];
    let first = zetalab(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).contains("skipping gated"));
    let csv = stdout(&first);
    assert_eq!(csv.lines().count(), 3);
    let run_dir = std::fs::read_dir(&runs).unwrap().next().unwrap().unwrap().path();
    assert!(run_dir.file_name().unwrap().to_str().unwrap().ends_with("-seed4"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["experiments"][0], "tiny");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);

    let again = zetalab(&args, dir.path());
    assert_eq!(stdout(&again), csv, "identical invocations give identical results");
    let other_jobs = zetalab(
        &[
            "experiment",
            "--config",
            cfg_s,
            "--name",
            "tiny",
            "--out-dir",
            runs_s,
            "--seed",
            "4",
            "--jobs",
            "2",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert_eq!(stdout(&other_jobs), csv, "results do not depend on --jobs");

    let report = zetalab(&["report", "--run", run_dir.to_str().unwrap(), "--format", "csv"], dir.path());
    assert_eq!(stdout(&report), csv);

    let gated = zetalab(&["experiment", "--config", cfg_s, "--name", "gated", "--out-dir", runs_s], dir.path());
    assert_eq!(gated.status.code(), Some(2));

    let model = dir.path().join("m.json");
    let o = zetalab(
        &["train", "--config", cfg_s, "--name", "tiny", "--seed", "4", "--out", model.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(saved["format_version"], 1);
    assert_eq!(saved["model"]["kind"], "forest");

    let o = zetalab(
        &[
            "evaluate",
            "--config",
            cfg_s,
            "--name",
            "tiny",
            "--seed",
            "4",
            "--model",
            model.to_str().unwrap(),
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let base_line = csv.lines().nth(1).unwrap();
    let eval_line = stdout(&o).lines().nth(1).unwrap().to_string();
    let precision = |l: &str| l.split(',').nth(8).unwrap().to_string();
    assert_eq!(precision(&eval_line), precision(base_line));

    let o = zetalab(
        &[
            "evaluate",
            "--config",
            cfg_s,
            "--name",
            "tiny",
            "--model",
            model.to_str().unwrap(),
            "--range",
            "20001:25000",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(precision(stdout(&o).lines().nth(1).unwrap()), precision(csv.lines().nth(2).unwrap()));
}
