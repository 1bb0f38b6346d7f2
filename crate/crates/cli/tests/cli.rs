use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny")
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

/// A scratch copy of the fixture so runs never write into the source tree.
struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        copy_dir(&fixture(), dir.path());
        Workspace { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn config(&self) -> PathBuf {
        self.path().join("hmlcr.toml")
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_hmlcr"))
            .arg("--config")
            .arg(self.config())
            .args(args)
            .env_remove("HMLCR_CONFIG")
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn read(&self, rel: &str) -> Vec<u8> {
        fs::read(self.path().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const INDEX_FILES: &[&str] = &[
    "out/index/documents.tsv",
    "out/index/vocabulary.txt",
    "out/index/features.tsv",
    "out/index/x.txt",
    "out/index/y.txt",
    "out/index/r.txt",
    "out/index/ingest.tsv",
    "out/index/fingerprint.txt",
];

#[test]
fn index_dimensions_match_hand_count() {
    let ws = Workspace::new();
    let summary = ws.ok(&["index"]);
    // 27 distinct words; 9 snippet blocks (3 per file) plus
    // refs:java.util.list, inherits:basewriter, implements:closeable and
    // refs:java.net.inetaddress
    assert!(
        summary.starts_with("documents\t3\nwords\t27\nfeatures\t13\nskipped\t0\n"),
        "{summary}"
    );
    let x = String::from_utf8(ws.read("out/index/x.txt")).unwrap();
    let y = String::from_utf8(ws.read("out/index/y.txt")).unwrap();
    assert!(x.starts_with("dense 27 3\n"));
    assert!(y.starts_with("dense 13 3\n"));
    assert_eq!(
        String::from_utf8(ws.read("out/index/vocabulary.txt"))
            .unwrap()
            .lines()
            .count(),
        27
    );
    let docs = String::from_utf8(ws.read("out/index/documents.tsv")).unwrap();
    assert_eq!(
        docs,
        "id\tlabel\nConfigParser.java\tconfig\nConfigWriter.java\tconfig\nnet/Socket.java\tnetwork\n"
    );
}

#[test]
fn index_is_idempotent() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    let first: Vec<Vec<u8>> = INDEX_FILES.iter().map(|f| ws.read(f)).collect();
    ws.ok(&["index"]);
    for (f, before) in INDEX_FILES.iter().zip(first) {
        assert_eq!(ws.read(f), before, "{f}");
    }
}

#[test]
fn missing_corpus_root_is_a_usage_error() {
    let ws = Workspace::new();
    let out = ws.run(&["--corpus", "/definitely/not/here", "index"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error\tusage\t"));
    assert!(err.contains("/definitely/not/here"));
}

#[test]
fn bad_config_is_a_usage_error() {
    let ws = Workspace::new();
    fs::write(ws.config(), "corpus = \"corpus\"\nunknown_key = 1\n").unwrap();
    let out = ws.run(&["index"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown_key"));
    let out = ws.run(&["--alpha", "3", "index"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_path_from_environment_and_flags_win() {
    let ws = Workspace::new();
    let out = Command::new(env!("CARGO_BIN_EXE_hmlcr"))
        .args(["--output", ws.path().join("elsewhere").to_str().unwrap(), "index"])
        .env("HMLCR_CONFIG", ws.config())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(ws.path().join("elsewhere/index/x.txt").is_file());
    assert!(!ws.path().join("out").exists());
}

#[test]
fn train_is_deterministic_and_reduces_loss() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    ws.ok(&["train"]);
    let model = ws.read("out/model.txt");
    let trace = ws.read("out/trace.tsv");
    ws.ok(&["train"]);
    assert_eq!(ws.read("out/model.txt"), model);
    assert_eq!(ws.read("out/trace.tsv"), trace);

    let trace = String::from_utf8(trace).unwrap();
    let totals: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(totals.len(), 201);
    assert!(totals.last().unwrap() < &totals[0]);
    assert!(String::from_utf8(model).unwrap().starts_with("hmlcr-model 1\n"));
}

#[test]
fn train_refuses_a_changed_corpus() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    let path = ws.path().join("corpus/ConfigWriter.java");
    let edited = fs::read_to_string(&path).unwrap().replace("disk", "the disk");
    fs::write(&path, edited).unwrap();
    let out = ws.run(&["train"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fingerprint mismatch"), "{}", stderr(&out));
}

#[test]
fn train_without_index_explains_itself() {
    let ws = Workspace::new();
    let out = ws.run(&["train"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("hmlcr index"));
}

#[test]
fn divergence_cites_the_learning_rate() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    let out = ws.run(&["--eta", "1e6", "--max-iter", "50", "train"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("eta = 1000000"), "{}", stderr(&out));
}

fn columns(records: &str, n: usize) -> Vec<String> {
    records
        .lines()
        .map(|l| l.split('\t').take(n).collect::<Vec<_>>().join("\t"))
        .collect()
}

#[test]
fn query_outputs() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    ws.ok(&["train"]);

    let cos = ws.ok(&["query", "save settings", "--method", "cos"]);
    // top score worked by hand from the tf-idf weights of "save" and "settings"
    let golden = fs::read_to_string(fixture().join("golden_cos_save_settings.tsv")).unwrap();
    assert_eq!(cos, golden);

    // alpha = 0 leaves only the text-text cosine in the score
    let zero = ws.ok(&["--alpha", "0", "query", "save settings"]);
    assert_eq!(columns(&zero, 3), columns(&cos, 3));

    let all = ws.ok(&["query", "socket", "-n", "50"]);
    assert_eq!(all.lines().count(), 3);
    assert!(all.starts_with("1\tnet/Socket.java\t"));
    let top = ws.ok(&["query", "socket", "-n", "1"]);
    assert_eq!(top.lines().count(), 1);

    // nothing in the vocabulary is still a successful run
    let out = ws.run(&["query", "zebra quokka"]);
    assert!(out.status.success());

    let out = ws.run(&["query", "socket", "-n", "0"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn query_refuses_a_mismatched_model() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    ws.ok(&["train"]);
    let out = ws.run(&["--weighting", "count", "query", "socket"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("does not match"), "{}", stderr(&out));
}

#[test]
fn cos_evaluation_matches_hand_scoring() {
    let ws = Workspace::new();
    let summary = ws.ok(&["eval", "--methods", "cos"]);
    // Every query puts one relevant document first. Config queries have two
    // relevant documents and rank both on top; network queries have one.
    // With three queries of each label the fold means average out to:
    let expected = "\
method\tmetric\tcutoff\tmean
cos\tP\t1\t1.000000
cos\tP\t2\t0.750000
cos\tP\t4\t0.375000
cos\tP\t5\t0.300000
cos\tR\t1\t0.750000
cos\tR\t3\t1.000000
cos\tR\t5\t1.000000
cos\tR\t20\t1.000000
cos\tnDCG\t2\t1.000000
cos\tnDCG\t4\t1.000000
cos\tnDCG\t10\t1.000000
cos\tnDCG\t20\t1.000000
";
    assert_eq!(summary, expected);
    assert_eq!(ws.read("out/eval/summary.tsv"), expected.as_bytes());
    let folds = String::from_utf8(ws.read("out/eval/folds.tsv")).unwrap();
    assert_eq!(folds.lines().count(), 7);
}

#[test]
fn evaluation_is_repeatable() {
    let ws = Workspace::new();
    ws.ok(&["eval"]);
    let metrics = ws.read("out/eval/metrics.tsv");
    ws.ok(&["eval"]);
    assert_eq!(ws.read("out/eval/metrics.tsv"), metrics);
    let text = String::from_utf8(metrics).unwrap();
    for m in ["cos", "lm", "lsi", "cfa", "cfa-cr", "hmlcr"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{m}\t"))), "{m}");
    }
}

#[test]
fn eval_without_labels_is_a_usage_error() {
    let ws = Workspace::new();
    fs::write(ws.path().join("queries.tsv"), "q1\t\topen socket\nq2\tnetwork\thost\n").unwrap();
    let out = ws.run(&["eval"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("labeled queries"));
}

#[test]
fn explain_outputs() {
    let ws = Workspace::new();
    ws.ok(&["index"]);
    ws.ok(&["train"]);
    assert_eq!(ws.ok(&["explain", "anything at all", "-t", "0"]), "");

    let words = ws.ok(&["explain", "refs:java.util.list", "-t", "4"]);
    assert_eq!(words.lines().count(), 4);
    assert!(words.lines().all(|l| l.split('\t').count() == 2));

    let side = ws.ok(&["explain", "refs:java.util.list", "-t", "2", "--with-cfa"]);
    assert_eq!(side.lines().count(), 3);
    assert!(side.lines().all(|l| l.split('\t').count() == 4));

    let out = ws.run(&["explain", "refs:java.utl.list"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("refs:java.util.list, refs:java.net.inetaddress, inherits:basewriter"),
        "{err}"
    );
}

#[test]
fn full_pipeline_is_byte_identical_across_runs() {
    let a = Workspace::new();
    let b = Workspace::new();
    for ws in [&a, &b] {
        ws.ok(&["index"]);
        ws.ok(&["train"]);
        ws.ok(&["eval"]);
    }
    let mut files: Vec<&str> = INDEX_FILES.to_vec();
    files.extend([
        "out/model.txt",
        "out/trace.tsv",
        "out/eval/metrics.tsv",
        "out/eval/summary.tsv",
        "out/eval/folds.tsv",
    ]);
    for f in files {
        assert_eq!(a.read(f), b.read(f), "{f}");
    }
}
