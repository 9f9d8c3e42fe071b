//! End-to-end checks of the command-line driver: output formats, exit
//! codes, and report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_uglearn")
}

fn data(path: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(path)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uglearn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn parse_covered_sentence_exits_zero() {
    let sentences = scratch("covered.tag");
    write(&sentences, "#a the_AT cat_NN1 sleeps_VVZ\n");
    let out = run(&[
        "parse",
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--sentences",
        sentences.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("a (S (NP (D the) (N1 (N cat))) (VP (V sleeps)))"),
        "{stdout}"
    );
}

#[test]
fn parse_uncovered_sentence_exits_one() {
    let sentences = scratch("uncovered.tag");
    write(&sentences, "#a Sam_NP1 can_VM sleep_VVI\n");
    let out = run(&[
        "parse",
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--sentences",
        sentences.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("NO PARSE a"));
}

#[test]
fn diagnostics_report_the_edge_bound() {
    let sentences = scratch("bounded.tag");
    write(&sentences, "#a the_AT cat_NN1 sleeps_VVZ\n");
    let out = run(&[
        "parse",
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--sentences",
        sentences.to_str().unwrap(),
        "--max-edges",
        "1",
        "--diagnostics",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("halted=edge_bound"), "{stderr}");
}

#[test]
fn format_errors_exit_two() {
    let grammar = scratch("broken.gr");
    write(&grammar, "S[] -> NP[] VP[] PP[]\n");
    let sentences = scratch("any.tag");
    write(&sentences, "#a the_AT cat_NN1 sleeps_VVZ\n");
    let out = run(&[
        "parse",
        "--grammar",
        grammar.to_str().unwrap(),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--sentences",
        sentences.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn missing_files_exit_two() {
    let out = run(&[
        "parse",
        "--grammar",
        "/nonexistent/g.gr",
        "--lexicon",
        &data("grammar/seed.lex"),
        "--sentences",
        "/nonexistent/s.tag",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pretrain_emits_a_valid_table() {
    let out = run(&[
        "pretrain",
        "--corpus",
        &data("corpus"),
        "--labelmap",
        &data("model/labels.map"),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("TOTAL "), "{stdout}");
    assert!(stdout.contains("S NP "), "{stdout}");
}

#[test]
fn learn_extends_the_grammar() {
    let sentences = scratch("learnable.tag");
    write(&sentences, "#a the_AT cat_NN1 slept_VVD quietly_RR\n");
    let out_grammar = scratch("learnt.gr");
    let out = run(&[
        "learn",
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--model",
        &data("model/model.cfg"),
        "--sentences",
        sentences.to_str().unwrap(),
        "--config",
        "C",
        "--out",
        out_grammar.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let learnt = std::fs::read_to_string(&out_grammar).unwrap();
    let seed = std::fs::read_to_string(data("grammar/seed.gr")).unwrap();
    let seed_rules = seed.lines().filter(|l| l.contains("->")).count();
    let learnt_rules = learnt.lines().filter(|l| l.contains("->")).count();
    assert!(learnt_rules > seed_rules, "no rule was learnt:\n{learnt}");
}

#[test]
fn eval_reports_coverage() {
    let out = run(&[
        "eval",
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--corpus",
        &data("corpus"),
        "--labelmap",
        &data("model/labels.map"),
        "--plausibility",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("coverage=28.3"), "{stdout}");
    assert!(stdout.contains("plausibility="), "{stdout}");
}

#[test]
fn experiment_reports_are_seed_deterministic() {
    let first = scratch("report-a.kv");
    let second = scratch("report-b.kv");
    for path in [&first, &second] {
        let out = run(&[
            "experiment",
            "--corpus",
            &data("corpus"),
            "--grammar",
            &data("grammar/seed.gr"),
            "--lexicon",
            &data("grammar/seed.lex"),
            "--model",
            &data("model/model.cfg"),
            "--labelmap",
            &data("model/labels.map"),
            "--seed",
            "7",
            "--machine-out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let table = String::from_utf8_lossy(&out.stdout);
        assert!(table.contains("Configuration"), "{table}");
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "machine reports differ across identical runs");
}

#[test]
fn experiment_without_learnt_configs_omits_plausibility() {
    let out = run(&[
        "experiment",
        "--corpus",
        &data("corpus"),
        "--grammar",
        &data("grammar/seed.gr"),
        "--lexicon",
        &data("grammar/seed.lex"),
        "--model",
        &data("model/model.cfg"),
        "--labelmap",
        &data("model/labels.map"),
        "--configs",
        "A",
    ]);
    assert!(
        out.status.success(),
        "empty plausible set is a warning, not a failure"
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("warning: plausible set is empty"),
        "{stdout}"
    );
}

#[test]
fn experiment_resplit_uses_the_seed() {
    let first = scratch("resplit-a.kv");
    let second = scratch("resplit-b.kv");
    for (seed, path) in [("3", &first), ("4", &second)] {
        let out = run(&[
            "experiment",
            "--corpus",
            &data("corpus"),
            "--grammar",
            &data("grammar/seed.gr"),
            "--lexicon",
            &data("grammar/seed.lex"),
            "--model",
            &data("model/model.cfg"),
            "--labelmap",
            &data("model/labels.map"),
            "--configs",
            "A,B",
            "--resplit",
            "15,40,40",
            "--seed",
            seed,
            "--machine-out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read_to_string(&first).unwrap();
    let b = std::fs::read_to_string(&second).unwrap();
    assert_ne!(a, b, "different seeds should draw different splits");
    assert!(a.contains("seed=3") && b.contains("seed=4"));
}
