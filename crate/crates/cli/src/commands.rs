use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hmlcr_core::corpus::{ingest_corpus, load_queries, tokenize_text, IngestReport, LabelRule};
use hmlcr_core::eval::cross_validate;
use hmlcr_core::hmlcr::{cfa_init, find_step_size, read_model, train, write_model, write_trace, ModelFile};
use hmlcr_core::retrieval::{format_results, top_words_for_feature};
use hmlcr_core::vectorize::write_dense;
use hmlcr_core::{CorpusIndex, LanguageProfile};

use crate::config::PipelineConfig;

const FINGERPRINT_FILE: &str = "fingerprint.txt";

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn build_index(config: &PipelineConfig) -> Result<(CorpusIndex, IngestReport)> {
    let profile = LanguageProfile::resolve(&config.profile)?;
    let rule = match &config.labels {
        Some(path) => LabelRule::load_manifest(path)?,
        None => LabelRule::PerFile,
    };
    let corpus = ingest_corpus(&config.corpus, &profile, &rule)?;
    let index = CorpusIndex::build(corpus.documents, &profile, &config.index_options())?;
    Ok((index, corpus.report))
}

/// Rebuilds the index and checks it against the fingerprint `index` wrote.
fn indexed_corpus(config: &PipelineConfig) -> Result<CorpusIndex> {
    let path = config.index_dir().join(FINGERPRINT_FILE);
    let stored = fs::read_to_string(&path).with_context(|| {
        format!(
            "index artifacts missing at {}; run `hmlcr index` first",
            config.index_dir().display()
        )
    })?;
    let (index, _) = build_index(config)?;
    check_fingerprint(stored.trim(), &index)?;
    Ok(index)
}

fn check_fingerprint(expected: &str, index: &CorpusIndex) -> Result<()> {
    if expected != index.fingerprint {
        return Err(hmlcr_core::Error::FingerprintMismatch {
            expected: expected.to_string(),
            found: index.fingerprint.clone(),
        }
        .into());
    }
    Ok(())
}

fn load_model(config: &PipelineConfig) -> Result<ModelFile> {
    let path = config.model_path();
    if !path.is_file() {
        bail!("no model at {}; run `hmlcr train` first", path.display());
    }
    Ok(read_model(&path)?)
}

/// The model must have been trained on exactly this corpus and feature space.
fn model_for_index(config: &PipelineConfig, index: &CorpusIndex) -> Result<ModelFile> {
    let model = load_model(config)?;
    check_fingerprint(&model.fingerprint, index)?;
    if model.vocabulary != index.vocabulary
        || model.features != index.feature_index
        || model.weighting != config.weighting
    {
        bail!("model vocabulary, feature index or weighting does not match the current index; retrain");
    }
    Ok(model)
}

pub fn index(config: &PipelineConfig) -> Result<String> {
    let (index, report) = build_index(config)?;
    let dir = config.index_dir();
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let mut docs = String::from("id\tlabel\n");
    for d in &index.documents {
        let _ = writeln!(docs, "{}\t{}", d.id, d.label);
    }
    let mut unbalanced = String::new();
    for id in &index.unbalanced {
        let _ = writeln!(unbalanced, "unbalanced\t{id}");
    }
    write(&dir.join("documents.tsv"), &docs)?;
    write(&dir.join("vocabulary.txt"), &index.vocabulary_dump())?;
    write(&dir.join("features.tsv"), &index.features.to_dump())?;
    write(&dir.join("x.txt"), &write_dense(&index.data.x))?;
    write(&dir.join("y.txt"), &write_dense(&index.data.y))?;
    write(&dir.join("r.txt"), &index.content.to_dump())?;
    write(&dir.join("ingest.tsv"), &(report.to_tsv() + &unbalanced))?;
    write(&dir.join(FINGERPRINT_FILE), &format!("{}\n", index.fingerprint))?;

    Ok(format!(
        "documents\t{}\nwords\t{}\nfeatures\t{}\nskipped\t{}\nfingerprint\t{}\n",
        index.len(),
        index.vocabulary.len(),
        index.feature_index.len(),
        report.skipped.len(),
        index.fingerprint
    ))
}

pub fn train_model(config: &PipelineConfig) -> Result<String> {
    let index = indexed_corpus(config)?;
    let problem = index.full_problem()?;
    let mut hyper = config.hyper();
    hyper.validate_for(problem.dx(), problem.dy())?;
    if config.auto_eta {
        hyper.eta = find_step_size(&problem, &hyper)?;
        log::info!("learning rate {:e}", hyper.eta);
    }
    let model = train(&problem, &hyper)?;
    let file = ModelFile::new(
        &model,
        &index.fingerprint,
        config.weighting,
        index.vocabulary.clone(),
        index.feature_index.clone(),
    );
    fs::create_dir_all(&config.output).with_context(|| format!("cannot create {}", config.output.display()))?;
    write_model(&config.model_path(), &file)?;
    write(&config.output.join("trace.tsv"), &write_trace(&model))?;
    Ok(format!(
        "iterations\t{}\nconverged\t{}\ninitial\t{:.6e}\nfinal\t{:.6e}\neta\t{:e}\n",
        model.trace.len(),
        model.converged,
        model.initial.total,
        model.final_loss().total,
        model.final_eta
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum QueryMethod {
    /// Text-code ensemble with the trained projections.
    Hmlcr,
    /// Plain cosine on word vectors; needs no model.
    Cos,
}

pub fn query(config: &PipelineConfig, text: &str, n: usize, method: QueryMethod) -> Result<String> {
    if n == 0 {
        bail!("-n must be at least 1");
    }
    let index = indexed_corpus(config)?;
    let retrieval = match method {
        QueryMethod::Cos => index.text_index()?,
        QueryMethod::Hmlcr => {
            let model = model_for_index(config, &index)?;
            index.retrieval_index(model.u, model.v, config.alpha)?
        }
    };
    let tokens = tokenize_text(text);
    let q = retrieval.query_vector(&tokens);
    if q.out_of_vocabulary > 0 {
        log::warn!("{} query tokens are not in the vocabulary", q.out_of_vocabulary);
    }
    Ok(format_results(&retrieval.rank(&q, n)?))
}

pub fn evaluate(config: &PipelineConfig) -> Result<String> {
    let Some(path) = &config.queries else {
        bail!("evaluation needs a query file; set `queries` or pass --queries");
    };
    let queries = load_queries(path)?;
    let (index, _) = build_index(config)?;
    let report = cross_validate(&index, &queries.queries, &config.eval_config())?;
    let dir = config.output.join("eval");
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let summary = report.summary_tsv();
    write(&dir.join("metrics.tsv"), &report.to_tsv())?;
    write(&dir.join("summary.tsv"), &summary)?;
    write(&dir.join("folds.tsv"), &report.folds_tsv())?;
    Ok(summary)
}

pub fn explain(config: &PipelineConfig, key: &str, t: usize, with_cfa: bool) -> Result<String> {
    if t == 0 {
        return Ok(String::new());
    }
    let model = load_model(config)?;
    let learned = top_words_for_feature(key, &model.u, &model.v, &model.vocabulary, &model.features, t)?;
    let mut out = String::new();
    if !with_cfa {
        for (w, s) in &learned {
            let _ = writeln!(out, "{w}\t{s:.6}");
        }
        return Ok(out);
    }
    let index = indexed_corpus(config)?;
    let model = model_for_index(config, &index)?;
    let init = cfa_init(&index.data.x, &index.data.y, model.hyper.k, model.hyper.seed)?;
    let baseline = top_words_for_feature(key, &init.u, &init.v, &index.vocabulary, &index.feature_index, t)?;
    let _ = writeln!(out, "hmlcr_word\thmlcr_score\tcfa_word\tcfa_score");
    for ((w, s), (cw, cs)) in learned.iter().zip(&baseline) {
        let _ = writeln!(out, "{w}\t{s:.6}\t{cw}\t{cs:.6}");
    }
    Ok(out)
}
