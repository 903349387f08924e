use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// A scratch copy of a bundled fixture corpus.
fn scratch(name: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixtures().join(name), dir.path());
    dir
}

fn nereval(corpus: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nereval"))
        .arg("--corpus")
        .arg(corpus)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn validate_clean_fixture() {
    let o = nereval(&fixtures().join("figure1"), &["validate"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stderr(&o), "");
}

#[test]
fn validate_reports_overlapping_gold() {
    let dir = scratch("figure1");
    let gold = dir.path().join("gold/goldbloom.tsv");
    let mut content = fs::read_to_string(&gold).unwrap();
    content.push_str("7\t14\tPerson\tCharles\n");
    fs::write(&gold, content).unwrap();
    let o = nereval(dir.path(), &["validate"]);
    assert_eq!(code(&o), 1);
    let errors: Vec<_> = stderr(&o)
        .lines()
        .filter(|l| l.starts_with("error["))
        .map(str::to_string)
        .collect();
    assert_eq!(errors.len(), 1, "{errors:?}");
    assert!(errors[0].contains("gold-overlap"));
}

#[test]
fn validate_strict_promotes_warnings() {
    let dir = scratch("figure1");
    // two hypothesis mentions overlapping each other is only a warning
    let hyp = dir.path().join("hyp/tool/goldbloom.tsv");
    let mut content = fs::read_to_string(&hyp).unwrap();
    content.push_str("0\t6\tPerson\tVictor\n");
    fs::write(&hyp, content).unwrap();
    assert_eq!(code(&nereval(dir.path(), &["validate"])), 0);
    assert_eq!(code(&nereval(dir.path(), &["validate", "--strict"])), 1);
}

#[test]
fn missing_manifest_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = nereval(dir.path(), &["validate"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("manifest.json"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(
        code(&nereval(&fixtures().join("figure1"), &["evaluate", "--format", "xml"])),
        2
    );
    assert_eq!(
        code(&nereval(
            &fixtures().join("figure1"),
            &["evaluate", "--strata", "overall,people"]
        )),
        2
    );
    assert_eq!(
        code(&nereval(
            &fixtures().join("figure1"),
            &["evaluate", "--annotator", "nobody"]
        )),
        2
    );
}

#[test]
fn evaluate_worked_example_to_files() {
    let out = tempfile::tempdir().unwrap();
    let o = nereval(
        &fixtures().join("figure1"),
        &["evaluate", "--out", out.path().to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let spatial = fs::read_to_string(out.path().join("spatial.md")).unwrap();
    let typical = fs::read_to_string(out.path().join("typical.md")).unwrap();
    assert!(spatial.contains("| Overall | 0.56 | 0.33 | 0.50 | 0.30 |"));
    assert!(spatial.contains("| Politics | 0.56 | 0.33 | 0.50 | 0.30 |"));
    assert!(typical.contains("| Overall | 0.78 | 0.70 |"));
    assert!(typical.contains("| Person | 0.67 | 0.50 |"));

    let manifest = json(&out.path().join("run-manifest.json"));
    assert_eq!(manifest["config"]["annotators"], serde_json::json!(["tool"]));
    assert_eq!(manifest["corpus_digest"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn evaluate_is_reproducible_across_jobs() {
    let corpus = fixtures().join("mini");
    let runs: Vec<Vec<Vec<u8>>> = ["1", "8"]
        .iter()
        .map(|jobs| {
            let out = tempfile::tempdir().unwrap();
            let o = nereval(
                &corpus,
                &[
                    "evaluate",
                    "--format",
                    "json",
                    "--jobs",
                    jobs,
                    "--out",
                    out.path().to_str().unwrap(),
                ],
            );
            assert_eq!(code(&o), 0);
            ["spatial.json", "typical.json", "run-manifest.json"]
                .iter()
                .map(|f| fs::read(out.path().join(f)).unwrap())
                .collect()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn perfect_hypothesis_scores_one() {
    let dir = scratch("figure1");
    copy_dir(&dir.path().join("gold"), &dir.path().join("hyp/perfect"));
    let o = nereval(
        dir.path(),
        &[
            "evaluate",
            "--annotator",
            "perfect",
            "--strata",
            "overall",
            "--format",
            "csv",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("Overall,1.00,0.00,1.00,0.00"), "{text}");
    assert!(text.contains("Overall,1.00,1.00"), "{text}");
}

#[test]
fn two_annotators_match_single_runs() {
    let dir = scratch("figure1");
    copy_dir(&dir.path().join("gold"), &dir.path().join("hyp/perfect"));
    let run = |args: &[&str]| {
        let out = tempfile::tempdir().unwrap();
        let mut all = vec!["evaluate", "--format", "json", "--out", out.path().to_str().unwrap()];
        all.extend_from_slice(args);
        assert_eq!(code(&nereval(dir.path(), &all)), 0);
        (
            json(&out.path().join("spatial.json")),
            json(&out.path().join("typical.json")),
        )
    };
    let both = run(&[]);
    for name in ["tool", "perfect"] {
        let single = run(&["--annotator", name]);
        assert_eq!(both.0[name], single.0[name]);
        assert_eq!(both.1[name], single.1[name]);
    }
}

#[test]
fn evaluate_without_hypotheses_is_a_finding() {
    let dir = scratch("figure1");
    fs::remove_dir_all(dir.path().join("hyp")).unwrap();
    let o = nereval(dir.path(), &["evaluate"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no hypothesis"));
}

#[test]
fn stats_on_fixture_and_empty_corpus() {
    let o = nereval(&fixtures().join("figure1"), &["stats", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("category,documents,Person,Location,Organization,Date,mentions\n"));
    assert!(text.contains("Politics,1,4,2,4,0,10\n"));
    assert!(text.contains("Total,1,4,2,4,0,10\n"));

    let empty = tempfile::tempdir().unwrap();
    fs::write(empty.path().join("manifest.json"), "{}").unwrap();
    let o = nereval(empty.path(), &["stats", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Total,0,0,0,0,0,0\n"));
}

fn write_model(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("model.json");
    fs::write(&path, json).unwrap();
    path
}

#[test]
fn zero_rate_perturbation_reproduces_gold() {
    let dir = scratch("mini");
    let model = write_model(dir.path(), "{}");
    let o = nereval(
        dir.path(),
        &["perturb", "--model", model.to_str().unwrap(), "--name", "copy"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for id in ["pele", "curie", "kahlo"] {
        let gold = fs::read(dir.path().join(format!("gold/{id}.tsv"))).unwrap();
        let copy = fs::read(dir.path().join(format!("hyp/copy/{id}.tsv"))).unwrap();
        assert_eq!(gold, copy);
    }
    let ledger = json(&dir.path().join("ledgers/copy.json"));
    assert_eq!(
        ledger["documents"]["pele"]["expected"],
        serde_json::json!({"fm": 4, "pm": 0, "wh": 0, "cm": 0})
    );
}

#[test]
fn full_miss_rate_gives_empty_files() {
    let dir = scratch("mini");
    let model = write_model(dir.path(), r#"{"miss_rate": 1.0}"#);
    let o = nereval(
        dir.path(),
        &["perturb", "--model", model.to_str().unwrap(), "--name", "blind"],
    );
    assert_eq!(code(&o), 0);
    for id in ["pele", "curie", "kahlo"] {
        let content = fs::read_to_string(dir.path().join(format!("hyp/blind/{id}.tsv"))).unwrap();
        assert_eq!(content, "# start\tend\ttype\tsurface\n");
    }
}

#[test]
fn seeded_perturbation_is_repeatable_and_guarded() {
    let dir = scratch("mini");
    let model = write_model(
        dir.path(),
        r#"{"miss_rate": 0.3, "boundary_rate": 0.4, "spurious_rate": 1.5, "seed": 9,
            "type_confusion": {"Organization": {"Organization": 0.5, "Location": 0.5}}}"#,
    );
    let m = model.to_str().unwrap();
    let snapshot = |dir: &Path| -> Vec<Vec<u8>> {
        let mut files: Vec<_> = fs::read_dir(dir.join("hyp/noisy"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files.push(dir.join("ledgers/noisy.json"));
        files.iter().map(|f| fs::read(f).unwrap()).collect()
    };
    assert_eq!(
        code(&nereval(dir.path(), &["perturb", "--model", m, "--name", "noisy"])),
        0
    );
    let first = snapshot(dir.path());

    let o = nereval(dir.path(), &["perturb", "--model", m, "--name", "noisy"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--overwrite"));

    assert_eq!(
        code(&nereval(
            dir.path(),
            &["perturb", "--model", m, "--name", "noisy", "--overwrite"]
        )),
        0
    );
    assert_eq!(snapshot(dir.path()), first);

    // the new annotator is immediately evaluable and the ledger predicts its counts
    let o = nereval(dir.path(), &["validate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ledger = json(&dir.path().join("ledgers/noisy.json"));
    let (mut fm, mut pm, mut wh, mut cm) = (0, 0, 0, 0);
    for doc in ledger["documents"].as_object().unwrap().values() {
        fm += doc["expected"]["fm"].as_u64().unwrap();
        pm += doc["expected"]["pm"].as_u64().unwrap();
        wh += doc["expected"]["wh"].as_u64().unwrap();
        cm += doc["expected"]["cm"].as_u64().unwrap();
    }
    let o = nereval(
        dir.path(),
        &[
            "evaluate",
            "--annotator",
            "noisy",
            "--strata",
            "overall",
            "--format",
            "json",
            "--digits",
            "6",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let spatial: serde_json::Value = serde_json::from_str(text.split("\n\n").next().unwrap()).unwrap();
    let full_precision = spatial["noisy"]["Overall"]["full_precision"].as_f64();
    let expected = (fm + pm + wh > 0).then(|| fm as f64 / (fm + pm + wh) as f64);
    match (full_precision, expected) {
        (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6),
        (a, b) => assert_eq!(a, b),
    }
    let full_recall = spatial["noisy"]["Overall"]["full_recall"].as_f64().unwrap();
    assert!((full_recall - fm as f64 / (fm + pm + cm) as f64).abs() < 1e-6);
}

#[test]
fn invalid_model_is_rejected() {
    let dir = scratch("mini");
    let model = write_model(dir.path(), r#"{"miss_rate": 2}"#);
    let o = nereval(
        dir.path(),
        &["perturb", "--model", model.to_str().unwrap(), "--name", "x"],
    );
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("hyp/x").exists());
}

#[test]
fn diff_of_reports() {
    let dir = scratch("figure1");
    let out = |name: &str, ann: &str, strata: &str| {
        let path = dir.path().join(name);
        let o = nereval(
            dir.path(),
            &[
                "evaluate",
                "--annotator",
                ann,
                "--strata",
                strata,
                "--format",
                "json",
                "--out",
                path.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&o), 0);
        path.join("spatial.json")
    };
    let a = out("a", "tool", "overall");
    let a2 = out("a2", "tool", "overall");
    let full = out("full", "tool", "overall,types");

    let o = nereval(
        dir.path(),
        &["diff", a.to_str().unwrap(), a2.to_str().unwrap(), "--format", "csv"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "stratum,tool FP,tool PP,tool FR,tool PR\nOverall,0.00,0.00,0.00,0.00\n"
    );

    // same annotator name, gold-perfect output in a second corpus
    let better = scratch("figure1");
    fs::remove_dir_all(better.path().join("hyp/tool")).unwrap();
    copy_dir(&better.path().join("gold"), &better.path().join("hyp/tool"));
    let b = better.path().join("out");
    let o = nereval(
        better.path(),
        &[
            "evaluate",
            "--strata",
            "overall",
            "--format",
            "json",
            "--out",
            b.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 0);
    let o = nereval(
        dir.path(),
        &["diff", a.to_str().unwrap(), b.join("spatial.json").to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("| Overall | +0.44 | -0.33 | +0.50 | -0.30 |"),
        "{}",
        stdout(&o)
    );

    let o = nereval(dir.path(), &["diff", a.to_str().unwrap(), full.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("different strata"));
}
