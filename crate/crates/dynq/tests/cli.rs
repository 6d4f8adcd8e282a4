use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dynq(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynq")).args(args).env("DYNQ_CACHE_DIR", cache).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn preper_record() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&dynq(&["preper", "--field", "5", "--c", "-1"], tmp.path()));
    assert_eq!(v["count"], 7);
    assert_eq!(v["label"], "7(2,1,1)b");
    assert_eq!(v["field"], "Q(sqrt(5))");
}

#[test]
fn parametrize_instances() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&dynq(&["parametrize", "--type", "10(3,1,1)", "--x", "2"], tmp.path()));
    assert_eq!((v["d"].as_i64(), v["c"].as_str()), (Some(337), Some("-301/144")));
    assert_eq!(v["equals_type"], true);
    let v = json(&dynq(&["parametrize", "--type", "10(3,2)", "--x", "1"], tmp.path()));
    assert_eq!((v["portrait"].as_str(), v["contains"].as_bool(), v["equals_type"].as_bool()), (Some("14(3,2)"), Some(true), Some(false)));
    let bad = dynq(&["parametrize", "--type", "8(4)", "--x", "0"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("degenerate"));
}

#[test]
fn counting_and_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&dynq(&["count", "--T", "5", "--alpha", "0", "--beta", "1"], tmp.path()));
    assert_eq!(v["count"], 10);
    let v = json(&dynq(&["curve", "count-fp", "--model", "1,2,1,2,6,4,1", "--p", "7"], tmp.path()));
    assert_eq!(v["genus"], 2);
    assert_eq!(v["hasse_weil"], true);
    let bad = dynq(&["curve", "count-fp", "--model", "1,2,1,2,6,4,1", "--p", "13"], tmp.path());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bad reduction"));
    for (anchor, n) in [("aux:12(2)", 7), ("aux:12(2,1,1)b", 16), ("aux:12(4)", 12), ("aux:12(4,2)", 12)] {
        assert_eq!(json(&dynq(&["curve", "count-fp", "--fixture", anchor], tmp.path()))["count"], n, "{anchor}");
    }
    let v = json(&dynq(&["curve", "bound", "--fixture", "aux:12(2,1,1)b"], tmp.path()));
    assert_eq!((v["stoll"].as_i64(), v["tightened"]["stoll"].as_i64()), (Some(18), Some(17)));
    let v = json(&dynq(&["curve", "bound", "--fixture", "aux:12(4)"], tmp.path()));
    assert_eq!(v["lorenzini_tucker_exact"], "108/5");
    assert_eq!(v["tightened"]["lorenzini_tucker"], 20);
    let on = |pt: &str| json(&dynq(&["curve", "verify", "--type", "10(3,1,1)", "--field", "337", "--point", pt], tmp.path()))["on_curve"].clone();
    assert_eq!(on("2,sqrt(337)"), true);
    assert_eq!(on("2,1"), false);
}

#[test]
fn survey_resume_and_classify() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["survey", "--fields", "5,-1", "--height-bound", "60", "--rational-height-bound", "400"];
    let first = dynq(&args, tmp.path());
    assert!(first.status.success());
    let lines: Vec<Value> = first.stdout.split(|&b| b == b'\n').filter(|l| !l.is_empty()).map(|l| serde_json::from_slice(l).unwrap()).collect();
    assert!(lines.iter().any(|r| r["field"] == "Q(sqrt(-1))" && r["c"] == "sqrt(-1)" && r["label"] == "5(2)a"));
    assert!(lines.iter().any(|r| r["field"] == "Q(sqrt(5))" && r["c"] == "-1" && r["label"] == "7(2,1,1)b"));
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 2);

    let mut resumed_args = args.to_vec();
    resumed_args.push("--resume");
    let again = dynq(&resumed_args, tmp.path());
    assert_eq!(again.stdout, first.stdout);
    assert_eq!(String::from_utf8_lossy(&again.stderr).matches("cached").count(), 2);

    let file = tmp.path().join("records.jsonl");
    std::fs::write(&file, &first.stdout).unwrap();
    let input = file.to_str().unwrap();
    let rt = dynq(&["classify", "--input", input, "--records", "--recompute"], tmp.path());
    assert!(rt.status.success(), "{}", String::from_utf8_lossy(&rt.stderr));
    assert_eq!(rt.stdout, first.stdout);
    let table = dynq(&["--format", "csv", "classify", "--input", input], tmp.path());
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.starts_with("label,count\n"));
    let total: usize = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, lines.len());
}

#[test]
fn config_file_and_disc_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("dynq.conf");
    std::fs::write(&cfg, "disc_bound = 4\nheight_schedule = 1:30, 4:40\nworker_count = 2\n").unwrap();
    let out = dynq(&["--config", cfg.to_str().unwrap(), "survey"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    // |Δ| ≤ 4 gives Q(√-3) and Q(i), with B interpolated between the anchors
    assert!(err.contains("Q(sqrt(-3)) B = 36") && err.contains("Q(sqrt(-1)) B = 40"), "{err}");
    std::fs::write(&cfg, "disc_bound = 1/3\n").unwrap();
    assert_eq!(dynq(&["--config", cfg.to_str().unwrap(), "survey"], tmp.path()).status.code(), Some(1));
}

#[test]
fn usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dynq(&["survey"], tmp.path()).status.code(), Some(2));
    assert_eq!(dynq(&["preper", "--field", "5", "--c", "1/0"], tmp.path()).status.code(), Some(2));
    assert_ne!(dynq(&["frobnicate"], tmp.path()).status.code(), Some(0));
}

#[test]
fn fixtures_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dynq(&["fixtures", "verify"], tmp.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().all(|l| l.contains("\"pass\":true")));
}
