use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::CommandFactory;
use serde_json::Value;

const GT: &str = r#"{"id":"a","labels":["happy","excited"]}
{"id":"b","labels":["sad"]}
{"id":"c","labels":["worried","angry","nervous"]}
"#;

const PRED: &str = r#"{"id":"a","labels":["happiness"]}
{"id":"b","labels":["sad","lonely"]}
{"id":"c","labels":["anxious"]}
"#;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn emoset(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emoset"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_rows(o: &Output) -> Vec<Value> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// The single output directory of `command` under `out`.
fn result_dir(out: &Path, command: &str) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with(&format!("{command}-")))
        .collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

#[test]
fn evaluate_identity_scores_one() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let rows = stdout_rows(&emoset(&tmp.path().join("out"), &["evaluate", "--gt", &gt, "--pred", &gt]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["strategy"], "M2");
    assert_eq!(rows[0]["mean_f"].as_f64(), Some(1.0));
    assert!(String::from_utf8(emoset(&tmp.path().join("out"), &["evaluate", "--gt", &gt, "--pred", &gt]).stdout)
        .unwrap()
        .contains("\"mean_f\":1.000000"));
}

#[test]
fn evaluate_all_wheel_strategies_adds_m_avg() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let pred = write(tmp.path(), "pred.jsonl", PRED);
    let out = tmp.path().join("out");
    let rows = stdout_rows(&emoset(&out, &["evaluate", "--gt", &gt, "--pred", &pred, "--strategy", "M1,M2,M3-all"]));
    let reports: Vec<&Value> = rows.iter().filter(|r| r["kind"] == "report").collect();
    let mavg: Vec<&Value> = rows.iter().filter(|r| r["kind"] == "m_avg").collect();
    assert_eq!(reports.len(), 12);
    assert_eq!(mavg.len(), 1);
    let mean = reports.iter().map(|r| r["mean_f"].as_f64().unwrap()).sum::<f64>() / 12.0;
    assert!((mavg[0]["m_avg"].as_f64().unwrap() - mean).abs() < 1e-5);
    let files = fs::read_dir(result_dir(&out, "evaluate")).unwrap().count();
    assert_eq!(files, 12 + 2, "one file per report plus the two tables");
}

#[test]
fn missing_prediction_file_exits_2_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let missing = tmp.path().join("nope.jsonl");
    let o = emoset(&tmp.path().join("out"), &["evaluate", "--gt", &gt, "--pred", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["exit_code"], 2);
    assert_eq!(err["path"], missing.to_str().unwrap());
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_and_validation_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let gt = write(tmp.path(), "gt.jsonl", GT);
    assert_eq!(emoset(&out, &["evaluate", "--gt", &gt, "--pred", &gt, "--strategy", "M9"]).status.code(), Some(1));
    assert_eq!(emoset(&out, &["evaluate", "--bogus"]).status.code(), Some(1));
    let bad = write(tmp.path(), "bad.jsonl", "{\"id\":\"a\",\"labels\":[]}\n");
    let o = emoset(&out, &["evaluate", "--gt", &bad, "--pred", &gt]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"], "validation");
}

#[test]
fn correlate_identical_reports_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let pred = write(tmp.path(), "pred.jsonl", PRED);
    let out = tmp.path().join("out");
    stdout_rows(&emoset(&out, &["evaluate", "--gt", &gt, "--pred", &pred, "--strategy", "M1"]));
    let report = result_dir(&out, "evaluate").join("pred.M1.json");
    let copy = tmp.path().join("copy.json");
    fs::copy(&report, &copy).unwrap();
    let rows = stdout_rows(&emoset(
        &out,
        &["correlate", "--report", report.to_str().unwrap(), "--report", copy.to_str().unwrap()],
    ));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["pcc"].as_f64(), Some(1.0));
    assert_eq!(rows[0]["n"], 3);
}

#[test]
fn baseline_is_reproducible_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let run = |out: &str, seed: &str| {
        let out = tmp.path().join(out);
        stdout_rows(&emoset(&out, &["--seed", seed, "baseline", "--ids-from", &gt]));
        fs::read(result_dir(&out, "baseline").join("baseline.jsonl")).unwrap()
    };
    assert_eq!(run("one", "7"), run("two", "7"));
}

#[test]
fn textmetrics_worked_example() {
    let tmp = tempfile::tempdir().unwrap();
    let rows = stdout_rows(&emoset(
        tmp.path(),
        &[
            "textmetrics",
            "--reference",
            "The clue is \u{201c}the weather is great\u{201d}. His emotion is \u{201c}happy\u{201d}.",
            "--hypothesis",
            "The clue is \u{201c}the weather is bad\u{201d}. His emotion is \u{201c}sad\u{201d}.",
        ],
    ));
    assert_eq!(rows[0]["bleu_1"].to_string(), "0.818182");
}

#[test]
fn delimited_format() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = write(tmp.path(), "gt.jsonl", GT);
    let o = emoset(tmp.path(), &["--format", "delimited", "evaluate", "--gt", &gt, "--pred", &gt]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,run,strategy,n_samples,mean_precision,mean_recall,mean_f,oov_gt_total,oov_pred_total"));
    assert!(lines.next().unwrap().contains(",1.000000,1.000000,1.000000,"));
}

#[test]
fn help_lists_every_flag() {
    fn walk(cmd: &clap::Command, path: Vec<String>, out: &mut Vec<(Vec<String>, Vec<String>)>) {
        let flags = cmd.get_arguments().filter_map(|a| a.get_long().map(|l| format!("--{l}"))).collect();
        out.push((path.clone(), flags));
        for sub in cmd.get_subcommands() {
            let mut p = path.clone();
            p.push(sub.get_name().to_string());
            walk(sub, p, out);
        }
    }
    let mut all = Vec::new();
    walk(&emoset::cli::Cli::command(), Vec::new(), &mut all);
    assert!(all.len() >= 11);
    let tmp = tempfile::tempdir().unwrap();
    for (path, flags) in all {
        let mut args: Vec<&str> = path.iter().map(String::as_str).collect();
        args.push("--help");
        let o = emoset(tmp.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{path:?}");
        let help = String::from_utf8(o.stdout).unwrap();
        for f in flags {
            assert!(help.contains(&f), "{path:?} help lacks {f}");
        }
    }
}

#[test]
fn replay_reproduces_shipped_fixtures() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = manifest().join("fixtures");
    let cache = fx.join("llm_cache");
    let cache = cache.to_str().unwrap();
    let label_file = |name: &str| fx.join(name).to_str().unwrap().to_string();
    let cases = [
        ("expand", vec!["expand", "--kind", "synonyms"], "synonym_labels.txt", "synonyms.tsv"),
        ("expand", vec!["expand", "--kind", "forms"], "form_labels.txt", "forms.tsv"),
        ("grouping", vec!["grouping", "partition"], "grouping_labels.txt", "partition.json"),
    ];
    for (i, (command, args, labels, expected)) in cases.into_iter().enumerate() {
        let out = tmp.path().join(i.to_string());
        let labels = label_file(labels);
        let mut full = args.clone();
        full.extend(["--labels", &labels, "--cache", cache]);
        let o = emoset(&out, &full);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let dir_prefix = if command == "grouping" { "grouping-partition" } else { command };
        let got = fs::read(result_dir(&out, dir_prefix).join(expected)).unwrap();
        assert_eq!(got, fs::read(fx.join("expected").join(expected)).unwrap(), "{expected}");
    }
}

#[test]
fn replay_miss_is_an_upstream_error() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = write(tmp.path(), "labels.txt", "never cached\n");
    let o = emoset(
        &tmp.path().join("out"),
        &["grouping", "partition", "--labels", &labels, "--cache", tmp.path().to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn live_mode_without_endpoint_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = write(tmp.path(), "labels.txt", "happy\n");
    let o = Command::new(env!("CARGO_BIN_EXE_emoset"))
        .env_remove("EMOSET_LLM_BASE_URL")
        .args(["--out", tmp.path().to_str().unwrap(), "expand", "--kind", "forms", "--mode", "live", "--labels", &labels])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
