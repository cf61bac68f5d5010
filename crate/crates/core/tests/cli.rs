mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gensquad::eval::{score, HarnessConfig};
use gensquad::pipeline::read_dataset;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .env_remove("FORGE_SEED")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn context(depth: &str) -> String {
    let tree = common::fixture("family.ged");
    let o = forge(&["context", "--tree", tree.to_str().unwrap(), "--person", "@SP@", "--depth", depth]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

const OTHERS: [&str; 15] = [
    "Alexander", "Mary", "Tim", "Ruth", "Jacob", "Sarah", "Noah", "Grace", "Carol", "Matt", "Mia", "Jonathan",
    "Joanne", "Yalma", "Kate",
];

#[test]
fn depth_zero_context_is_sp_and_spouse() {
    let text = context("0");
    assert!(text.contains("Emily") && text.contains("John"), "{text}");
    for name in OTHERS {
        assert!(!text.contains(name), "{name} in {text}");
    }
}

#[test]
fn depth_two_context_reaches_grandparents() {
    let text = context("2");
    assert!(["Tim", "Ruth", "Jacob", "Sarah"].iter().any(|n| text.contains(n)), "{text}");
    assert!(!context("1").contains("Jacob"));
}

#[test]
fn unknown_person_fails() {
    let tree = common::fixture("family.ged");
    let o = forge(&["context", "--tree", tree.to_str().unwrap(), "--person", "@NOPE@"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("@NOPE@"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(forge(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(forge(&["generate", "--depths", "x", "--input", "nothing"]).status.code(), Some(1));
}

#[test]
fn missing_file_is_an_io_error() {
    assert_eq!(forge(&["verify", "--dataset", "/definitely/not/here.json"]).status.code(), Some(3));
}

fn generate(dir: &Path, extra: &[&str]) -> Output {
    let input = common::fixture("family.ged");
    let out = dir.join("out");
    let mut args = vec!["generate", "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap(), "--depths", "1"];
    args.extend(extra);
    forge(&args)
}

#[test]
fn generate_verify_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = generate(dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in ["gen-squad-1.json", "gen-squad-1-train.json", "gen-squad-1-test.json", "gen-squad-1-eval.json", "stats.tsv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let dataset = out.join("gen-squad-1.json");
    let v = forge(&["verify", "--dataset", dataset.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stdout(&v));

    // Gold predictions score 100, and the CLI report equals the in-process one.
    let ds = read_dataset(&dataset).unwrap();
    let gold = gensquad::eval::gold_predictions(&ds);
    let preds = dir.path().join("preds.json");
    fs::write(&preds, serde_json::to_vec(&gold).unwrap()).unwrap();
    let report = dir.path().join("report.tsv");
    let s = forge(&["score", "--dataset", dataset.to_str().unwrap(), "--predictions", preds.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(s.status.success());
    let expected = score(&ds, &gold, &HarnessConfig::default());
    assert_eq!(expected.overall.f1, 100.0);
    assert_eq!(fs::read_to_string(&report).unwrap(), expected.to_tsv());
    assert_eq!(stdout(&s), expected.to_tsv());

    // One shifted offset makes verify fail with exit code 2.
    let text = fs::read_to_string(&dataset).unwrap();
    let at = text.find("\"answer_start\": ").unwrap() + "\"answer_start\": ".len();
    let digits = text[at..].find(|c: char| !c.is_ascii_digit()).unwrap();
    let shifted: usize = text[at..at + digits].parse::<usize>().unwrap() + 1;
    let broken = format!("{}{}{}", &text[..at], shifted, &text[at + digits..]);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, broken).unwrap();
    assert_eq!(forge(&["verify", "--dataset", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_env_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("forge.conf");
    fs::write(&cfg, "global_seed = 5\nworkers = 1\n").unwrap();
    let manifest_seed = |extra: &[&str], env: Option<&str>| {
        let out = dir.path().join("out");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_forge"));
        cmd.args(["generate", "--config", cfg.to_str().unwrap(), "--input", common::fixture("family.ged").to_str().unwrap()])
            .args(["--output", out.to_str().unwrap(), "--depths", "0"])
            .args(extra)
            .env_remove("FORGE_SEED");
        if let Some(e) = env {
            cmd.env("FORGE_SEED", e);
        }
        assert!(cmd.output().unwrap().status.success());
        let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
        m["config"]["global_seed"].as_u64().unwrap()
    };
    assert_eq!(manifest_seed(&[], None), 5);
    assert_eq!(manifest_seed(&[], Some("6")), 6);
    assert_eq!(manifest_seed(&["--global_seed", "7"], Some("6")), 7);
}
