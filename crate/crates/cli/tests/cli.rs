use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use noiseaudit::vecstore::{write_predictions, PredictionSet};
use noiseaudit::{LabelSpace, Split};
use rand::Rng;
use rand::SeedableRng;
use serde_json::Value;
use tempfile::TempDir;

fn noiseaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noiseaudit"))
        .args(args)
        .env("NOISEAUDIT_THREADS", "2")
        .output()
        .expect("spawn noiseaudit")
}

fn ok(args: &[&str]) -> String {
    let out = noiseaudit(args);
    assert!(
        out.status.success(),
        "noiseaudit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A generated benchmark with injected noise, laid out as the CLI writes it.
struct Bench {
    _dir: TempDir,
    root: PathBuf,
}

impl Bench {
    fn new(separation: f64, rate: f64) -> Self {
        let dir = TempDir::new().unwrap();
        let root = dir.path().to_path_buf();
        fs::write(
            root.join("spec.json"),
            format!(
                r#"{{"n_positive_classes":4,"per_class":30,"n_negatives":60,"dim":8,"class_separation":{separation},"seed":3}}"#
            ),
        )
        .unwrap();
        let gen = root.join("gen");
        ok(&[
            "synth",
            "generate",
            "--config",
            s(&root.join("spec.json")),
            "--clean-fraction",
            "0.5",
            "--out-dir",
            s(&gen),
        ]);
        let noisy = root.join("noisy");
        ok(&[
            "synth",
            "inject",
            "--labels",
            s(&gen.join("labels.txt")),
            "--train",
            s(&gen.join("train.jsonl")),
            "--rate",
            &rate.to_string(),
            "--seed",
            "9",
            "--out-dir",
            s(&noisy),
        ]);
        Bench { _dir: dir, root }
    }

    fn path(&self, rel: &str) -> String {
        self.root.join(rel).to_str().unwrap().to_string()
    }

    fn detect(&self, strategy: &str, extra: &[&str], out: &str) -> String {
        let (labels, train, emb, clean, o) = (
            self.path("gen/labels.txt"),
            self.path("noisy/train.jsonl"),
            self.path("gen/embeddings.nrcm"),
            self.path("gen/clean.jsonl"),
            self.path(out),
        );
        let mut args = vec![
            "detect",
            strategy,
            "--labels",
            &labels,
            "--train",
            &train,
            "--embeddings",
            &emb,
            "--clean",
            &clean,
            &emb,
            "identity",
            "--out",
            &o,
        ];
        args.extend_from_slice(extra);
        ok(&args);
        o
    }

    /// Random probability rows for the noisy train split, columns in label order.
    fn predictions(&self, seed: u64) -> String {
        let ls = LabelSpace::read(Path::new(&self.path("gen/labels.txt"))).unwrap();
        let d = noiseaudit::data::load_dataset(Path::new(&self.path("noisy/train.jsonl")), Split::Train, &ls).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = ls.len();
        let mut rows = Vec::with_capacity(d.len() * dim);
        for _ in 0..d.len() {
            let raw: Vec<f32> = (0..dim).map(|_| rng.random_range(0.01f32..1.0)).collect();
            let sum: f32 = raw.iter().sum();
            rows.extend(raw.iter().map(|v| v / sum));
        }
        let ids = d.instances().iter().map(|i| i.id.clone()).collect();
        let set = PredictionSet::new(ids, ls.labels().to_vec(), rows).unwrap();
        let out = self.path("preds.nrcm");
        write_predictions(&set, Path::new(&out)).unwrap();
        out
    }
}

#[test]
fn help_is_available_for_every_subcommand() {
    let cases: &[&[&str]] = &[
        &["--help"],
        &["analyze", "score", "--help"],
        &["analyze", "confusion", "--help"],
        &["analyze", "topk", "--help"],
        &["analyze", "seeds", "--help"],
        &["detect", "intrinsic", "--help"],
        &["detect", "es-eliminate", "--help"],
        &["detect", "es-relabel", "--help"],
        &["apply", "eliminate", "--help"],
        &["apply", "relabel", "--help"],
        &["sample", "downsample", "--help"],
        &["collapse", "binary", "--help"],
        &["synth", "generate", "--help"],
        &["synth", "inject", "--help"],
        &["synth", "evaluate", "--help"],
        &["synth", "sweep", "--help"],
        &["robustness", "compare", "--help"],
        &["validate", "matrix", "--help"],
        &["validate", "dataset", "--help"],
        &["validate", "manifest", "--help"],
    ];
    for args in cases {
        let out = ok(args);
        assert!(out.contains("Usage"), "{args:?}");
    }
    assert!(ok(&["detect", "es-relabel", "--help"]).contains("pseudocode"));
}

#[test]
fn es_relabel_manifest_is_deterministic() {
    let b = Bench::new(8.0, 0.3);
    let first = fs::read(b.detect("es-relabel", &[], "m1.json")).unwrap();
    let second = fs::read(b.detect("es-relabel", &[], "m2.json")).unwrap();
    assert_eq!(first, second);

    let v1 = json(&["validate", "manifest", &b.path("m1.json"), "--format", "json"]);
    let v2 = json(&["validate", "manifest", &b.path("m2.json"), "--format", "json"]);
    assert_eq!(v1["digest"], v2["digest"]);
    assert_eq!(v1["relabel"], 18);
}

#[test]
fn pipeline_recovers_injected_noise() {
    let b = Bench::new(8.0, 0.3);
    let m = b.detect("es-relabel", &["--mode", "pseudocode", "--k", "3"], "relabel.json");
    let report = json(&[
        "synth",
        "evaluate",
        "--ledger",
        &b.path("noisy/ledger.json"),
        "--manifest",
        &m,
        "--format",
        "json",
    ]);
    assert_eq!(report["injected"], 18);
    assert_eq!(report["recall"], 1.0);
    assert_eq!(report["precision"], 1.0);
    assert_eq!(report["label_accuracy"], 1.0);

    let labels = b.path("gen/labels.txt");
    let fixed = b.path("fixed");
    ok(&[
        "apply",
        "relabel",
        "--labels",
        &labels,
        "--train",
        &b.path("noisy/train.jsonl"),
        "--manifest",
        &m,
        "--out-dir",
        &fixed,
    ]);
    assert_eq!(
        fs::read_to_string(b.path("fixed/train.jsonl")).unwrap(),
        fs::read_to_string(b.path("gen/train.jsonl")).unwrap(),
        "relabeling restores the clean split"
    );
    let counts = json(&[
        "validate",
        "dataset",
        "--labels",
        &labels,
        "--train",
        &b.path("fixed/train.jsonl"),
        "--format",
        "json",
    ]);
    assert_eq!(counts["train"]["positive"], 60);
    let variant: Value = serde_json::from_str(&fs::read_to_string(b.path("fixed/report.json")).unwrap()).unwrap();
    let digest = json(&["validate", "manifest", &m, "--format", "json"])["digest"].clone();
    assert_eq!(variant["manifest_digest"], digest);

    let e = b.detect("es-eliminate", &[], "elim.json");
    ok(&[
        "apply",
        "eliminate",
        "--labels",
        &labels,
        "--train",
        &b.path("noisy/train.jsonl"),
        "--manifest",
        &e,
        "--out-dir",
        &b.path("pruned"),
    ]);
    let counts = json(&[
        "validate",
        "dataset",
        "--labels",
        &labels,
        "--train",
        &b.path("pruned/train.jsonl"),
        "--format",
        "json",
    ]);
    assert_eq!(counts["train"]["total"], 72);
}

#[test]
fn topk_with_k1_equals_score() {
    let b = Bench::new(2.0, 0.2);
    let preds = b.predictions(5);
    let (labels, train) = (b.path("gen/labels.txt"), b.path("noisy/train.jsonl"));
    let common = [
        "--labels",
        &labels,
        "--train",
        &train,
        "--predictions",
        &preds,
        "--format",
        "json",
    ];
    let score = json(&[&["analyze", "score"][..], &common].concat());
    let topk = json(&[&["analyze", "topk", "--k", "1"][..], &common].concat());
    assert_eq!(topk["score"], score);
    let top3 = json(&[&["analyze", "topk", "--k", "3"][..], &common].concat());
    assert!(top3["score"]["f1"].as_f64().unwrap() >= score["f1"].as_f64().unwrap());

    let csv = ok(&[
        "analyze",
        "confusion",
        "--labels",
        &labels,
        "--train",
        &train,
        "--predictions",
        &preds,
        "--csv",
    ]);
    assert_eq!(csv.lines().count(), 1 + 5);
    assert!(csv.starts_with("gold\\pred,"));
}

#[test]
fn intrinsic_detection_from_predictions() {
    let b = Bench::new(4.0, 0.2);
    let preds = b.predictions(11);
    let (labels, train, emb) = (
        b.path("gen/labels.txt"),
        b.path("noisy/train.jsonl"),
        b.path("gen/embeddings.nrcm"),
    );
    let seeds_path = b.path("seeds.json");
    ok(&[
        "analyze",
        "seeds",
        "--labels",
        &labels,
        "--train",
        &train,
        "--predictions",
        &preds,
        "--format",
        "json",
        "--out",
        &seeds_path,
    ]);
    let from_seeds = b.path("is_seeds.json");
    let from_preds = b.path("is_preds.json");
    ok(&[
        "detect",
        "intrinsic",
        "--labels",
        &labels,
        "--train",
        &train,
        "--embeddings",
        &emb,
        "--seeds",
        &seeds_path,
        "--out",
        &from_seeds,
    ]);
    ok(&[
        "detect",
        "intrinsic",
        "--labels",
        &labels,
        "--train",
        &train,
        "--embeddings",
        &emb,
        "--predictions",
        &preds,
        "--out",
        &from_preds,
    ]);
    assert_eq!(fs::read(&from_seeds).unwrap(), fs::read(&from_preds).unwrap());
    let m: Value = serde_json::from_str(&fs::read_to_string(&from_seeds).unwrap()).unwrap();
    assert_eq!(m["provenance"]["strategy"], "IS");
}

fn manifest_json(ids: &[&str]) -> String {
    serde_json::json!({
        "eliminate": ids,
        "relabel": {},
        "provenance": {"strategy": "ES-eliminate", "k": 5, "seed_source": "test"}
    })
    .to_string()
}

#[test]
fn robustness_counts_shared_ids() {
    let dir = TempDir::new().unwrap();
    let sets: [&[&str]; 5] = [&["x", "a"], &["x", "b"], &["x"], &["a", "c"], &[]];
    let mut paths = Vec::new();
    for (i, ids) in sets.iter().enumerate() {
        let p = dir.path().join(format!("m{i}.json"));
        fs::write(&p, manifest_json(ids)).unwrap();
        paths.push(p.to_str().unwrap().to_string());
    }
    let mut args = vec!["robustness", "compare", "--format", "json", "--manifests"];
    args.extend(paths.iter().map(String::as_str));
    let r = json(&args);
    assert_eq!(r["by_count"]["3"], serde_json::json!(["x"]));
    assert_eq!(r["by_count"]["2"], serde_json::json!(["a"]));
    assert_eq!(r["union"], 4);
    assert_eq!(r["common_to_all"], 0);
    assert_eq!(r["manifests"].as_array().unwrap().len(), 5);
}

fn error_of(args: &[&str]) -> (i32, Value) {
    let out = noiseaudit(args);
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object");
    (out.status.code().unwrap(), err["error"].clone())
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (code, err) = error_of(&["detect", "es-eliminate"]);
    assert_eq!((code, err["kind"].as_str().unwrap()), (2, "usage"));
    let (code, _) = error_of(&["no-such-command"]);
    assert_eq!(code, 2);

    let missing = dir.path().join("absent.nrcm");
    let (code, err) = error_of(&["validate", "matrix", s(&missing)]);
    assert_eq!((code, err["kind"].as_str().unwrap()), (4, "io"));
    assert_eq!(err["path"], s(&missing));

    let bad = dir.path().join("bad.nrcm");
    fs::write(&bad, b"NRCX garbage").unwrap();
    let (code, err) = error_of(&["validate", "matrix", s(&bad)]);
    assert_eq!((code, err["kind"].as_str().unwrap()), (3, "validation"));

    let labels = dir.path().join("labels.txt");
    fs::write(&labels, "no_relation\nA\n").unwrap();
    let data = dir.path().join("train.jsonl");
    fs::write(&data, "{\"id\":\"1\",\"relation\":\"Z\"}\n").unwrap();
    let (code, err) = error_of(&["validate", "dataset", "--labels", s(&labels), "--train", s(&data)]);
    assert_eq!(code, 3, "{err}");

    let manifest = dir.path().join("m.json");
    fs::write(&manifest, manifest_json(&["1", "1"])).unwrap();
    let (code, _) = error_of(&["validate", "manifest", s(&manifest)]);
    assert_eq!(code, 3);
}

#[test]
fn downsample_and_collapse_write_variants() {
    let b = Bench::new(8.0, 0.0);
    let (labels, train) = (b.path("gen/labels.txt"), b.path("gen/train.jsonl"));
    ok(&[
        "sample",
        "downsample",
        "--labels",
        &labels,
        "--train",
        &train,
        "--ratio",
        "1:3",
        "--seed",
        "4",
        "--out-dir",
        &b.path("ds"),
    ]);
    let report: Value = serde_json::from_str(&fs::read_to_string(b.path("ds/report.json")).unwrap()).unwrap();
    assert_eq!(report["before"]["train"]["negative"], 30);
    assert_eq!(report["after"]["train"]["negative"], 10);
    assert_eq!(report["after"]["train"]["positive"], 60);

    ok(&[
        "collapse",
        "binary",
        "--labels",
        &labels,
        "--train",
        &train,
        "--out-dir",
        &b.path("bin"),
    ]);
    let ls = fs::read_to_string(b.path("bin/labels.txt")).unwrap();
    let ls = LabelSpace::parse(&ls).unwrap();
    assert_eq!(ls.labels(), ["relation", "no_relation"]);
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(
        &cfg,
        r#"{"n_positive_classes":3,"per_class":20,"n_negatives":30,"dim":6,"separation":[1.0,8.0],"rate":[0.2],"seeds":[0,1],"strategies":["es-eliminate","es-relabel","intrinsic"]}"#,
    )
    .unwrap();
    let out = dir.path().join("rows.csv");
    ok(&["synth", "sweep", "--config", s(&cfg), "--out", s(&out)]);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3);
    assert!(csv
        .lines()
        .next()
        .unwrap()
        .starts_with("separation,rate,k,seed,strategy"));

    let (code, _) = error_of(&[
        "synth",
        "sweep",
        "--config",
        s(&dir.path().join("none.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 4);
}
