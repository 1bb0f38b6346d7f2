//! Metrics, baselines and the five-fold cross-validation harness.

mod baselines;
mod metrics;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CodeDocument, Query};
use crate::error::{Error, Result};
use crate::hmlcr::{cfa_init, cfa_plus_cr_train, train, Hyperparams};
use crate::pipeline::CorpusIndex;

pub use baselines::{cos_ranker, LanguageModel, Lsi, Ranker};
pub use metrics::{dcg, ndcg_at_p, precision_at_n, recall_at_n};

/// Query id → ids of the documents sharing its label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelevanceJudgments {
    pub relevant: BTreeMap<String, BTreeSet<String>>,
}

impl RelevanceJudgments {
    pub fn from_labels(queries: &[Query], docs: &[CodeDocument]) -> Result<Self> {
        let mut relevant = BTreeMap::new();
        for q in queries {
            let label = q.label.as_deref().ok_or_else(|| Error::UnlabeledQuery(q.id.clone()))?;
            let set: BTreeSet<String> = docs.iter().filter(|d| d.label == label).map(|d| d.id.clone()).collect();
            if set.is_empty() {
                log::warn!("query {}: no document carries label `{label}`", q.id);
            }
            relevant.insert(q.id.clone(), set);
        }
        Ok(RelevanceJudgments { relevant })
    }

    pub fn get(&self, query_id: &str) -> Option<&BTreeSet<String>> {
        self.relevant.get(query_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cos,
    Lm,
    Lsi,
    Cfa,
    CfaCr,
    Hmlcr,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Cos,
        Method::Lm,
        Method::Lsi,
        Method::Cfa,
        Method::CfaCr,
        Method::Hmlcr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cos => "cos",
            Method::Lm => "lm",
            Method::Lsi => "lsi",
            Method::Cfa => "cfa",
            Method::CfaCr => "cfa-cr",
            Method::Hmlcr => "hmlcr",
        }
    }

    pub fn is_learned(self) -> bool {
        matches!(self, Method::Cfa | Method::CfaCr | Method::Hmlcr)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "P")]
    Precision,
    #[serde(rename = "R")]
    Recall,
    #[serde(rename = "nDCG")]
    Ndcg,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Precision => "P",
            Metric::Recall => "R",
            Metric::Ndcg => "nDCG",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldOrientation {
    /// One fold's queries train, the other four test.
    #[default]
    TrainOnOne,
    /// Four folds train, one tests.
    TestOnOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub methods: Vec<Method>,
    pub precision_cutoffs: Vec<usize>,
    pub recall_cutoffs: Vec<usize>,
    pub ndcg_cutoffs: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
    pub orientation: FoldOrientation,
    pub hyper: Hyperparams,
    pub alpha: f64,
    /// Collection-model weight of the language-model baseline.
    pub lm_lambda: f64,
    /// Latent dimension of the LSI baseline; the model's k when absent.
    pub lsi_k: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            methods: Method::ALL.to_vec(),
            precision_cutoffs: vec![1, 2, 4, 5],
            recall_cutoffs: vec![1, 3, 5, 20],
            ndcg_cutoffs: vec![2, 4, 10, 20],
            folds: 5,
            seed: 0,
            orientation: FoldOrientation::default(),
            hyper: Hyperparams::default(),
            alpha: 0.5,
            lm_lambda: 0.5,
            lsi_k: None,
        }
    }
}

impl EvalConfig {
    fn cells(&self) -> Vec<(Metric, usize)> {
        let mut out = Vec::new();
        out.extend(self.precision_cutoffs.iter().map(|&n| (Metric::Precision, n)));
        out.extend(self.recall_cutoffs.iter().map(|&n| (Metric::Recall, n)));
        out.extend(self.ndcg_cutoffs.iter().map(|&n| (Metric::Ndcg, n)));
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
        }
        if self.cells().iter().any(|&(_, n)| n == 0) {
            return Err(Error::InvalidArgument("cutoffs must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        self.hyper.validate()
    }
}

/// Sorted ids, seeded shuffle, round-robin over `k` folds.
pub fn assign_folds<S: AsRef<str>>(query_ids: &[S], k: usize, seed: u64) -> Vec<Vec<String>> {
    let mut ids: Vec<String> = query_ids.iter().map(|s| s.as_ref().to_string()).collect();
    ids.sort();
    ids.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    for f in &mut folds {
        f.sort();
    }
    folds
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub method: Method,
    pub metric: Metric,
    pub cutoff: usize,
    pub fold: usize,
    /// `None` when the method failed on this fold.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub rows: Vec<MetricRow>,
    pub folds: Vec<Vec<String>>,
    /// Test queries without any relevant document, per fold.
    pub excluded: Vec<Vec<String>>,
    pub failures: Vec<(Method, usize, String)>,
}

impl MetricReport {
    /// Mean over folds; `None` if any fold failed.
    pub fn mean(&self, method: Method, metric: Metric, cutoff: usize) -> Option<f64> {
        let vals: Vec<Option<f64>> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.metric == metric && r.cutoff == cutoff)
            .map(|r| r.value)
            .collect();
        if vals.is_empty() {
            return None;
        }
        let vals: Option<Vec<f64>> = vals.into_iter().collect();
        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn value(&self, method: Method, metric: Metric, cutoff: usize, fold: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.metric == metric && r.cutoff == cutoff && r.fold == fold)
            .and_then(|r| r.value)
    }

    /// `method<TAB>metric<TAB>cutoff<TAB>fold<TAB>value`
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("method\tmetric\tcutoff\tfold\tvalue\n");
        for r in &self.rows {
            let v = r.value.map(|v| format!("{v:.6}")).unwrap_or_else(|| "failed".into());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{v}",
                r.method.as_str(),
                r.metric.as_str(),
                r.cutoff,
                r.fold
            );
        }
        out
    }

    /// `method<TAB>metric<TAB>cutoff<TAB>mean`
    pub fn summary_tsv(&self) -> String {
        let mut keys: Vec<(Method, Metric, usize)> = Vec::new();
        for r in &self.rows {
            let k = (r.method, r.metric, r.cutoff);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let mut out = String::from("method\tmetric\tcutoff\tmean\n");
        for (m, metric, c) in keys {
            let v = self
                .mean(m, metric, c)
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "failed".into());
            let _ = writeln!(out, "{}\t{}\t{c}\t{v}", m.as_str(), metric.as_str());
        }
        out
    }

    /// `fold<TAB>query_id`
    pub fn folds_tsv(&self) -> String {
        let mut out = String::from("fold\tquery\n");
        for (i, f) in self.folds.iter().enumerate() {
            for q in f {
                let _ = writeln!(out, "{i}\t{q}");
            }
        }
        out
    }
}

/// Builds the ranker for `method`, training learned methods on the
/// documents at `train_docs`.
pub fn build_ranker(
    method: Method,
    index: &CorpusIndex,
    train_docs: &[usize],
    config: &EvalConfig,
) -> Result<Box<dyn Ranker>> {
    Ok(match method {
        Method::Cos => Box::new(cos_ranker(&index.data, &index.vocabulary)?),
        Method::Lm => Box::new(LanguageModel::new(&index.documents, config.lm_lambda)?),
        Method::Lsi => Box::new(Lsi::new(
            &index.data,
            &index.vocabulary,
            config.lsi_k.unwrap_or(config.hyper.k),
        )?),
        Method::Cfa | Method::CfaCr | Method::Hmlcr => {
            if train_docs.is_empty() {
                return Err(Error::InvalidArgument("no training documents".into()));
            }
            let problem = index.problem(train_docs)?;
            let (u, v) = match method {
                Method::Cfa => {
                    let init = cfa_init(&problem.x, &problem.y, config.hyper.k, config.hyper.seed)?;
                    (init.u, init.v)
                }
                Method::CfaCr => {
                    let m = cfa_plus_cr_train(&problem, &config.hyper)?;
                    (m.u, m.v)
                }
                _ => {
                    let m = train(&problem, &config.hyper)?;
                    (m.u, m.v)
                }
            };
            Box::new(index.retrieval_index(u, v, config.alpha)?)
        }
    })
}

/// Mean of each metric cell over the test queries that have relevant
/// documents.
pub fn evaluate_queries(
    ranker: &dyn Ranker,
    queries: &[&Query],
    judgments: &RelevanceJudgments,
    cells: &[(Metric, usize)],
) -> Vec<f64> {
    let mut sums = vec![0.0; cells.len()];
    let mut counted = 0usize;
    for q in queries {
        let Some(relevant) = judgments.get(&q.id).filter(|r| !r.is_empty()) else {
            continue;
        };
        let ranked = ranker.rank(&q.tokens);
        for (s, &(metric, n)) in sums.iter_mut().zip(cells) {
            *s += match metric {
                Metric::Precision => precision_at_n(&ranked, relevant, n),
                Metric::Recall => recall_at_n(&ranked, relevant, n).expect("relevant set is non-empty"),
                Metric::Ndcg => ndcg_at_p(&ranked, relevant, n),
            };
        }
        counted += 1;
    }
    if counted > 0 {
        for s in &mut sums {
            *s /= counted as f64;
        }
    }
    sums
}

struct FoldResult {
    values: Vec<Result<Vec<f64>>>,
    excluded: Vec<String>,
}

/// Per-query means within each fold, then means across folds.
pub fn cross_validate(index: &CorpusIndex, queries: &[Query], config: &EvalConfig) -> Result<MetricReport> {
    config.validate()?;
    crate::corpus::require_labels(queries)?;
    if queries.len() < config.folds {
        return Err(Error::TooFewQueries {
            needed: config.folds,
            got: queries.len(),
        });
    }
    let judgments = RelevanceJudgments::from_labels(queries, &index.documents)?;
    let ids: Vec<&str> = queries.iter().map(|q| q.id.as_str()).collect();
    let folds = assign_folds(&ids, config.folds, config.seed);
    let by_id: BTreeMap<&str, &Query> = queries.iter().map(|q| (q.id.as_str(), q)).collect();
    let cells = config.cells();

    let results: Vec<FoldResult> = (0..folds.len())
        .into_par_iter()
        .map(|f| {
            let (train_ids, test_ids): (Vec<&String>, Vec<&String>) = match config.orientation {
                FoldOrientation::TrainOnOne => (
                    folds[f].iter().collect(),
                    folds
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != f)
                        .flat_map(|(_, q)| q)
                        .collect(),
                ),
                FoldOrientation::TestOnOne => (
                    folds
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != f)
                        .flat_map(|(_, q)| q)
                        .collect(),
                    folds[f].iter().collect(),
                ),
            };
            let mut train_docs: BTreeSet<usize> = BTreeSet::new();
            for q in &train_ids {
                for d in judgments.get(q).into_iter().flatten() {
                    if let Some(p) = index.position(d) {
                        train_docs.insert(p);
                    }
                }
            }
            let train_docs: Vec<usize> = train_docs.into_iter().collect();
            let test: Vec<&Query> = test_ids.iter().map(|id| by_id[id.as_str()]).collect();
            let excluded = test
                .iter()
                .filter(|q| judgments.get(&q.id).map_or(true, |r| r.is_empty()))
                .map(|q| q.id.clone())
                .collect();
            let values = config
                .methods
                .iter()
                .map(|&m| {
                    let ranker = build_ranker(m, index, &train_docs, config)?;
                    Ok(evaluate_queries(ranker.as_ref(), &test, &judgments, &cells))
                })
                .collect();
            FoldResult { values, excluded }
        })
        .collect();

    let mut report = MetricReport {
        folds,
        ..MetricReport::default()
    };
    for (mi, &method) in config.methods.iter().enumerate() {
        for (ci, &(metric, cutoff)) in cells.iter().enumerate() {
            for (f, r) in results.iter().enumerate() {
                report.rows.push(MetricRow {
                    method,
                    metric,
                    cutoff,
                    fold: f,
                    value: r.values[mi].as_ref().ok().map(|v| v[ci]),
                });
            }
        }
    }
    for (f, r) in results.into_iter().enumerate() {
        for (mi, v) in r.values.into_iter().enumerate() {
            if let Err(e) = v {
                log::warn!("{} failed on fold {f}: {e}", config.methods[mi].as_str());
                report.failures.push((config.methods[mi], f, e.to_string()));
            }
        }
        report.excluded.push(r.excluded);
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
