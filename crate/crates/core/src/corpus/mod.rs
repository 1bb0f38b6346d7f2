//! Corpus ingestion: source files and queries read from disk.

pub mod lexer;
pub mod profile;
pub mod tokenize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
pub use lexer::{strip, Segment, Stripped};
pub use profile::LanguageProfile;
pub use tokenize::{extract_tokens, is_english_stop_word, split_identifier, tokenize_code, tokenize_text};

/// One program file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeDocument {
    /// Relative path with `/` separators; unique within a corpus.
    pub id: String,
    pub path: PathBuf,
    pub source: String,
    pub tokens: Vec<String>,
    pub label: String,
}

impl CodeDocument {
    /// Builds a document from in-memory source. The id doubles as the path.
    pub fn from_source(
        id: impl Into<String>,
        label: impl Into<String>,
        source: impl Into<String>,
        profile: &LanguageProfile,
    ) -> Self {
        let id = id.into();
        let source = source.into();
        CodeDocument {
            path: PathBuf::from(&id),
            tokens: extract_tokens(&source, profile),
            label: label.into(),
            id,
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub label: Option<String>,
}

impl Query {
    /// Tokenizes `text`; `None` when nothing survives the stop list.
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<String>) -> Option<Self> {
        let text = text.into();
        let tokens = tokenize_text(&text);
        if tokens.is_empty() {
            return None;
        }
        Some(Query {
            id: id.into(),
            text,
            tokens,
            label: label.filter(|l| !l.is_empty()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelRule {
    /// Every file is its own label (its relative path).
    PerFile,
    /// Explicit relative path -> label map.
    Manifest(BTreeMap<String, String>),
}

impl LabelRule {
    /// Reads a manifest: one `path<TAB>label` record per line.
    pub fn load_manifest(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (file, label) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message: "expected `path<TAB>label`".into(),
            })?;
            if label.trim().is_empty() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: "empty label".into(),
                });
            }
            map.insert(file.trim().to_string(), label.trim().to_string());
        }
        Ok(LabelRule::Manifest(map))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub id: String,
    pub reason: String,
}

/// What happened during ingestion besides the documents themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub skipped: Vec<SkippedFile>,
    /// (document id, warning) pairs from tokenization.
    pub warnings: Vec<(String, String)>,
}

impl IngestReport {
    /// Tab-separated: `skip<TAB>id<TAB>reason` and `warn<TAB>id<TAB>message`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for s in &self.skipped {
            let _ = writeln!(out, "skip\t{}\t{}", s.id, s.reason);
        }
        for (id, w) in &self.warnings {
            let _ = writeln!(out, "warn\t{}\t{}", id, w.replace(['\t', '\n'], " "));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<CodeDocument>,
    pub report: IngestReport,
}

fn collect_files(dir: &Path, profile: &LanguageProfile, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let ft = entry.file_type().map_err(|e| Error::io(&path, e))?;
        if ft.is_dir() {
            collect_files(&path, profile, out)?;
        } else if ft.is_file() && profile.matches_extension(&path) {
            out.push(path);
        }
    }
    Ok(())
}

fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

enum FileOutcome {
    Doc(CodeDocument, Vec<String>),
    Skip(SkippedFile),
}

fn load_file(id: String, path: PathBuf, label: String, profile: &LanguageProfile) -> FileOutcome {
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) => {
            return FileOutcome::Skip(SkippedFile {
                id,
                reason: format!("unreadable: {e}"),
            })
        }
    };
    if bytes.contains(&0) {
        return FileOutcome::Skip(SkippedFile {
            id,
            reason: "binary content".into(),
        });
    }
    let source = match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(_) => {
            return FileOutcome::Skip(SkippedFile {
                id,
                reason: "not valid UTF-8".into(),
            })
        }
    };
    let stripped = strip(&source, profile);
    let tokens = tokenize::tokens_of_stripped(&stripped.segments, profile);
    FileOutcome::Doc(
        CodeDocument {
            id,
            path,
            source,
            tokens,
            label,
        },
        stripped.warnings,
    )
}

/// Reads every source file under `root` that matches the profile's
/// extensions, sorted by relative path.
pub fn ingest_corpus(root: &Path, profile: &LanguageProfile, rule: &LabelRule) -> Result<Corpus> {
    if !root.is_dir() {
        return Err(Error::MissingRoot(root.to_path_buf()));
    }
    let mut files = Vec::new();
    collect_files(root, profile, &mut files)?;
    let mut files: Vec<(String, PathBuf)> = files.into_iter().map(|p| (relative_id(root, &p), p)).collect();
    files.sort();

    let mut report = IngestReport::default();
    let mut jobs = Vec::with_capacity(files.len());
    match rule {
        LabelRule::PerFile => {
            for (id, path) in files {
                jobs.push((id.clone(), path, id));
            }
        }
        LabelRule::Manifest(map) => {
            let on_disk: BTreeSet<&str> = files.iter().map(|(id, _)| id.as_str()).collect();
            if let Some(missing) = map.keys().find(|k| !on_disk.contains(k.as_str())) {
                return Err(Error::ManifestEntryMissing(missing.clone()));
            }
            for (id, path) in files {
                match map.get(&id) {
                    Some(label) => jobs.push((id, path, label.clone())),
                    None => report.skipped.push(SkippedFile {
                        id,
                        reason: "not listed in manifest".into(),
                    }),
                }
            }
        }
    }

    let outcomes: Vec<FileOutcome> = jobs
        .into_par_iter()
        .map(|(id, path, label)| load_file(id, path, label, profile))
        .collect();

    let mut documents = Vec::new();
    for outcome in outcomes {
        match outcome {
            FileOutcome::Doc(doc, warnings) => {
                for w in warnings {
                    log::warn!("{}: {}", doc.id, w);
                    report.warnings.push((doc.id.clone(), w));
                }
                documents.push(doc);
            }
            FileOutcome::Skip(s) => {
                log::warn!("skipping {}: {}", s.id, s.reason);
                report.skipped.push(s);
            }
        }
    }
    report.skipped.sort_by(|a, b| a.id.cmp(&b.id));
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }
    Ok(Corpus { documents, report })
}

/// Parsed query file plus the records that were dropped.
#[derive(Debug, Clone, Default)]
pub struct QuerySet {
    pub queries: Vec<Query>,
    pub skipped: Vec<(usize, String)>,
}

/// Parses the line-oriented query format `id<TAB>label<TAB>text`.
///
/// Blank lines are ignored. A record whose text is empty, or whose text has
/// no token left after stop-word removal, is skipped with a warning. Any
/// line without exactly three fields is a fatal error.
pub fn parse_queries(text: &str, origin: &Path) -> Result<QuerySet> {
    let mut set = QuerySet::default();
    let mut seen = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        if fields.len() != 3 || fields[0].trim().is_empty() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: line_no,
                message: "expected `id<TAB>label<TAB>text`".into(),
            });
        }
        let (id, label, body) = (fields[0].trim(), fields[1].trim(), fields[2].trim());
        if !seen.insert(id.to_string()) {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: line_no,
                message: format!("duplicate query id `{id}`"),
            });
        }
        if body.is_empty() {
            log::warn!("{}:{line_no}: query `{id}` has empty text, skipped", origin.display());
            set.skipped.push((line_no, format!("query `{id}` has empty text")));
            continue;
        }
        let label = (!label.is_empty()).then(|| label.to_string());
        match Query::new(id, body, label) {
            Some(q) => set.queries.push(q),
            None => {
                log::warn!(
                    "{}:{line_no}: query `{id}` has no tokens after stop-word removal",
                    origin.display()
                );
                set.skipped
                    .push((line_no, format!("query `{id}` has no tokens after stop-word removal")));
            }
        }
    }
    Ok(set)
}

pub fn load_queries(path: &Path) -> Result<QuerySet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_queries(&text, path)
}

/// Fails unless every query carries a label.
pub fn require_labels(queries: &[Query]) -> Result<()> {
    match queries.iter().find(|q| q.label.is_none()) {
        Some(q) => Err(Error::UnlabeledQuery(q.id.clone())),
        None => Ok(()),
    }
}

/// Content hash over sorted (id, sha256(source)) pairs.
pub fn fingerprint(documents: &[CodeDocument]) -> String {
    let mut pairs: Vec<(&str, [u8; 32])> = documents
        .iter()
        .map(|d| (d.id.as_str(), Sha256::digest(d.source.as_bytes()).into()))
        .collect();
    pairs.sort();
    let mut hasher = Sha256::new();
    for (id, h) in pairs {
        hasher.update(id.as_bytes());
        hasher.update([0u8]);
        hasher.update(h);
    }
    hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_labeled_records() {
        let set = parse_queries(
            "q1\tA.java\tfix the parser\nq2\tB.java\tcrash on open\n",
            Path::new("q"),
        )
        .unwrap();
        assert_eq!(set.queries.len(), 2);
        assert_eq!(set.queries[0].label.as_deref(), Some("A.java"));
        assert_eq!(set.queries[1].tokens, ["crash", "open"]);
        require_labels(&set.queries).unwrap();
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_queries("q1\tA\tok text\nbroken line\n", Path::new("q")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_text_is_skipped() {
        let set = parse_queries("q1\tA\t\nq2\tA\tthe of to\nq3\tA\treal words\n", Path::new("q")).unwrap();
        assert_eq!(set.queries.len(), 1);
        assert_eq!(set.skipped.len(), 2);
    }

    #[test]
    fn unlabeled_queries_fail_evaluation_mode() {
        let set = parse_queries("q1\t\tserving time query\n", Path::new("q")).unwrap();
        assert_eq!(set.queries[0].label, None);
        assert!(matches!(require_labels(&set.queries), Err(Error::UnlabeledQuery(id)) if id == "q1"));
    }

    #[test]
    fn fingerprint_ignores_order() {
        let p = LanguageProfile::java();
        let a = CodeDocument::from_source("a.java", "a", "class A {}", &p);
        let b = CodeDocument::from_source("b.java", "b", "class B {}", &p);
        assert_eq!(
            fingerprint(&[a.clone(), b.clone()]),
            fingerprint(&[b.clone(), a.clone()])
        );
        let mut b2 = b;
        b2.source.push(' ');
        assert_ne!(fingerprint(std::slice::from_ref(&a)), fingerprint(&[a, b2]));
    }
}
