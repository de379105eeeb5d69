mod common;

use std::fs;
use std::path::{Path, PathBuf};

use causeffect::cli::{self, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use causeffect::pos::TAGSET;
use causeffect::preprocessed;

const SUNSHINE: &str = "Index;Text;Cause;Effect
0001.00001;The Sunshine State drew in a net influx of about $17.7 billion in adjusted gross income (AGI) - most of which (72 percent) came from those aged 55 and older. It is consistently one of the most popular destinations for retirees due to affordability and low taxes.;It is consistently one of the most popular destinations for retirees due to affordability and low taxes;The Sunshine State drew in a net influx of about $17.7 billion in adjusted gross income (AGI) - most of which (72 percent) came from those aged 55 and older
";

const SMALL: &str = "Index;Text;Cause;Effect
0001.00001;The Sunshine State drew in a net influx of about $17.7 billion in adjusted gross income (AGI) - most of which (72 percent) came from those aged 55 and older. It is consistently one of the most popular destinations for retirees due to affordability and low taxes.;It is consistently one of the most popular destinations for retirees due to affordability and low taxes;The Sunshine State drew in a net influx of about $17.7 billion in adjusted gross income (AGI) - most of which (72 percent) came from those aged 55 and older
0004.00001;Rising interest rates weighed on results. Vandelay Imports said its adjusted EBITDA fell 20.4%.;Rising interest rates weighed on results.;Vandelay Imports said its adjusted EBITDA fell 20.4%.
0005.00001;Net sales rose 8% because demand for cloud services increased.;demand for cloud services increased.;Net sales rose 8%
";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("causeffect").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> Run {
    let r = run(args);
    assert_eq!(r.code, EXIT_OK, "{args:?}: {}", r.err);
    r
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn preprocess_sunshine_instance() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SUNSHINE);
    let out = dir.path().join("p.tsv");
    let r = ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&out)]);
    assert!(r.out.contains("alignment failures: 0"));
    let body = fs::read_to_string(&out).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("# id=0001.00001"));
    assert_eq!(lines.next(), Some("The\tDT\tB-E"));
    assert_eq!(lines.next(), Some("Sunshine\tNNP\tI-E"));
    assert!(body.contains("It\tPRP\tB-C\n"));
    assert!(body.contains("taxes\tNNS\tI-C\n"));
    assert!(body.trim_end().ends_with(".\tSYM\t-"));
}

#[test]
fn preprocess_test_mode_has_no_labels() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.csv",
        "Index;Text\n1;Profits fell because costs rose.\n2;Nothing here.\n",
    );
    let out = dir.path().join("p.tsv");
    ok(&[
        "preprocess",
        "--corpus",
        s(&corpus),
        "--mode",
        "test",
        "--out",
        s(&out),
    ]);
    let blocks = preprocessed::read_file(&out).unwrap();
    assert_eq!(blocks.len(), 2);
    for b in &blocks {
        assert!(b.rows.iter().all(|r| r.label.name() == "-"));
    }
}

#[test]
fn alignment_failures_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.tsv");
    let r = run(&[
        "preprocess",
        "--corpus",
        s(&common::fixture_path()),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.out.contains("alignment failures: 12"), "{}", r.out);
    assert!(!out.exists());

    ok(&[
        "preprocess",
        "--corpus",
        s(&common::fixture_path()),
        "--out",
        s(&out),
        "--loose-align",
    ]);
    assert_eq!(preprocessed::read_file(&out).unwrap().len(), 240);
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.tsv");
    let r = run(&[
        "preprocess",
        "--corpus",
        "/nonexistent/corpus.csv",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("/nonexistent/corpus.csv"));
    assert!(!out.exists());
}

#[test]
fn malformed_row_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.csv",
        "Index;Text;Cause;Effect\n1;a b;a;b\n1;c d;c;d\n",
    );
    let r = run(&["audit", "--corpus", s(&corpus)]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("line 3"), "{}", r.err);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["preprocess"]).code, EXIT_USAGE);
    assert_eq!(run(&["no-such-command"]).code, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SUNSHINE);
    let out = dir.path().join("p.tsv");
    let r = run(&[
        "preprocess",
        "--corpus",
        s(&corpus),
        "--mode",
        "dev",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_USAGE);
    let r = run(&[
        "preprocess",
        "--corpus",
        s(&corpus),
        "--delimiter",
        "é",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SUNSHINE);
    let out = write(dir.path(), "p.tsv", "keep me\n");
    let r = run(&["preprocess", "--corpus", s(&corpus), "--out", s(&out)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(fs::read_to_string(&out).unwrap(), "keep me\n");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&out), "--force"]);
    assert!(fs::read_to_string(&out).unwrap().starts_with("# id=0001.00001\n"));
}

#[test]
fn audit_reports_rate() {
    let r = ok(&["audit", "--corpus", s(&common::fixture_path())]);
    assert!(r.out.contains("instances: 240\n"));
    assert!(r.out.contains("aligned: 228\n"));
    assert!(r.out.contains("alignment_rate: 0.95\n"));
}

#[test]
fn train_is_deterministic_and_memorizes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SUNSHINE);
    let gold = dir.path().join("gold.tsv");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&gold)]);

    let m1 = dir.path().join("m1.json");
    let m2 = dir.path().join("m2.json");
    for m in [&m1, &m2] {
        let r = ok(&[
            "train",
            "--input",
            s(&gold),
            "--model",
            s(m),
            "--epochs",
            "300",
            "--seed",
            "7",
        ]);
        assert!(r.out.contains("held-in accuracy: 1.000000"), "{}", r.out);
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());

    let pred = dir.path().join("pred.tsv");
    ok(&[
        "predict",
        "--model",
        s(&m1),
        "--input",
        s(&gold),
        "--out",
        s(&pred),
    ]);
    assert_eq!(
        fs::read_to_string(&pred).unwrap(),
        fs::read_to_string(&gold).unwrap()
    );
}

#[test]
fn train_rejects_zero_epochs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SUNSHINE);
    let gold = dir.path().join("gold.tsv");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&gold)]);
    let model = dir.path().join("m.json");
    let r = run(&[
        "train",
        "--input",
        s(&gold),
        "--model",
        s(&model),
        "--epochs",
        "0",
    ]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(!model.exists());
}

#[test]
fn unanimous_ensemble_reproduces_member_and_scores_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SMALL);
    let gold = dir.path().join("gold.tsv");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&gold)]);

    let names = ["bert", "bwm", "roberta", "xlnet", "large"];
    let mut members = Vec::new();
    for n in names {
        let p = dir.path().join(format!("{n}.tsv"));
        fs::copy(&gold, &p).unwrap();
        members.push(format!("{n}={}", p.display()));
    }
    let fused = dir.path().join("fused.tsv");
    let answers = dir.path().join("answers.csv");
    let r = ok(&[
        "ensemble",
        "--corpus",
        s(&corpus),
        "--members",
        &members.join(","),
        "--priority-model",
        "roberta",
        "--out",
        s(&fused),
        "--answers",
        s(&answers),
    ]);
    assert!(r.out.contains("extracted pairs: 3"));
    assert_eq!(fs::read(&fused).unwrap(), fs::read(&gold).unwrap());

    let answers = fs::read_to_string(&answers).unwrap();
    assert!(answers.starts_with("Index;Text;Cause;Effect\n"));
    assert!(answers.contains(
        ";Rising interest rates weighed on results.;Vandelay Imports said its adjusted EBITDA fell 20.4%.\n"
    ));

    let report = dir.path().join("report");
    ok(&[
        "score",
        "--corpus",
        s(&corpus),
        "--predictions",
        s(&fused),
        "--out",
        s(&report),
    ]);
    let kv = fs::read_to_string(report.with_extension("kv")).unwrap();
    for key in ["precision=1\n", "recall=1\n", "f1=1\n", "exact_match=1\n"] {
        assert!(kv.contains(key), "{key} missing from\n{kv}");
    }
    let txt = fs::read_to_string(report.with_extension("txt")).unwrap();
    assert!(txt.contains("f1           1.0000"));
}

#[test]
fn ensemble_rejects_unknown_priority_model() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SMALL);
    let gold = dir.path().join("gold.tsv");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&gold)]);
    let fused = dir.path().join("fused.tsv");
    let answers = dir.path().join("answers.csv");
    let r = run(&[
        "ensemble",
        "--corpus",
        s(&corpus),
        "--members",
        s(&gold),
        "--priority-model",
        "missing",
        "--out",
        s(&fused),
        "--answers",
        s(&answers),
    ]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(!fused.exists() && !answers.exists());
}

#[test]
fn ensemble_names_misaligned_instance() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.csv", SMALL);
    let gold = dir.path().join("gold.tsv");
    ok(&["preprocess", "--corpus", s(&corpus), "--out", s(&gold)]);
    let body = fs::read_to_string(&gold)
        .unwrap()
        .replacen("Rising\t", "Falling\t", 1);
    let bad = write(dir.path(), "bad.tsv", &body);
    let fused = dir.path().join("fused.tsv");
    let answers = dir.path().join("answers.csv");
    let r = run(&[
        "ensemble",
        "--corpus",
        s(&corpus),
        "--members",
        &format!("{},{}", s(&gold), s(&bad)),
        "--out",
        s(&fused),
        "--answers",
        s(&answers),
    ]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.err.contains("0004.00001"), "{}", r.err);
    assert!(!fused.exists());
}

#[test]
fn tagset_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tagset.tsv");
    ok(&["tagset", "--out", s(&out)]);
    let body = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), TAGSET.len());
    assert_eq!(lines[0], "0\t<PAD>");
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(*line, format!("{i}\t{}", TAGSET[i]));
    }
}
