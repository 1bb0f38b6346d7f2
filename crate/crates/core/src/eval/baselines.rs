//! Text-only baselines and the ranker abstraction shared with the learned
//! methods.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::corpus::CodeDocument;
use crate::error::{Error, Result};
use crate::retrieval::{cosine, RetrievalIndex};
use crate::vectorize::{DataMatrices, Vocabulary};

/// Orders every document of a corpus for a tokenized query.
pub trait Ranker: Send + Sync {
    fn rank(&self, tokens: &[String]) -> Vec<String>;
}

impl Ranker for RetrievalIndex {
    fn rank(&self, tokens: &[String]) -> Vec<String> {
        let q = self.query_vector(tokens);
        self.score_all(&q).into_iter().map(|r| r.doc_id).collect()
    }
}

fn order(ids: &[String], scores: &[f64]) -> Vec<String> {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| ids[a].cmp(&ids[b])));
    idx.into_iter().map(|i| ids[i].clone()).collect()
}

/// Cosine between the query and document text vectors.
pub fn cos_ranker(data: &DataMatrices, vocabulary: &Vocabulary) -> Result<RetrievalIndex> {
    RetrievalIndex::text_only(data, vocabulary.clone())
}

/// Query likelihood with Jelinek-Mercer smoothing:
/// `log P(q|d) = Σ_t log((1 − λ)·tf(t,d)/|d| + λ·P(t|C))`.
#[derive(Debug, Clone)]
pub struct LanguageModel {
    ids: Vec<String>,
    counts: Vec<HashMap<String, usize>>,
    lengths: Vec<usize>,
    collection: HashMap<String, f64>,
    /// Probability used for tokens the corpus never contains.
    floor: f64,
    lambda: f64,
}

impl LanguageModel {
    /// `lambda` is the weight of the collection model.
    pub fn new(docs: &[CodeDocument], lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "smoothing weight must lie in (0, 1), got {lambda}"
            )));
        }
        let mut counts = Vec::with_capacity(docs.len());
        let mut total: HashMap<String, usize> = HashMap::new();
        let mut n = 0usize;
        for d in docs {
            let mut c: HashMap<String, usize> = HashMap::new();
            for t in &d.tokens {
                *c.entry(t.clone()).or_default() += 1;
                *total.entry(t.clone()).or_default() += 1;
            }
            n += d.tokens.len();
            counts.push(c);
        }
        let collection = total
            .into_iter()
            .map(|(t, c)| (t, c as f64 / n.max(1) as f64))
            .collect();
        Ok(LanguageModel {
            ids: docs.iter().map(|d| d.id.clone()).collect(),
            lengths: docs.iter().map(|d| d.tokens.len()).collect(),
            counts,
            collection,
            floor: 1.0 / (n + 1) as f64,
            lambda,
        })
    }

    pub fn log_likelihood(&self, tokens: &[String], doc: usize) -> f64 {
        tokens
            .iter()
            .map(|t| {
                let pc = self.collection.get(t).copied().unwrap_or(self.floor);
                let len = self.lengths[doc];
                let pd = if len == 0 {
                    0.0
                } else {
                    self.counts[doc].get(t).copied().unwrap_or(0) as f64 / len as f64
                };
                ((1.0 - self.lambda) * pd + self.lambda * pc).ln()
            })
            .sum()
    }
}

impl Ranker for LanguageModel {
    fn rank(&self, tokens: &[String]) -> Vec<String> {
        let scores: Vec<f64> = (0..self.ids.len()).map(|j| self.log_likelihood(tokens, j)).collect();
        order(&self.ids, &scores)
    }
}

/// Cosine in the rank-k latent space of X: documents and queries are both
/// mapped by `U_kᵀ`.
#[derive(Debug, Clone)]
pub struct Lsi {
    ids: Vec<String>,
    vocabulary: Vocabulary,
    weighting: crate::vectorize::Weighting,
    idf: DVector<f64>,
    basis: DMatrix<f64>,
    docs: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl Lsi {
    pub fn new(data: &DataMatrices, vocabulary: &Vocabulary, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("LSI dimension must be positive".into()));
        }
        let x = &data.x;
        let svd = x.clone().svd(true, false);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .total_cmp(&svd.singular_values[a])
                .then(a.cmp(&b))
        });
        let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let top = s.first().copied().unwrap_or(0.0);
        let threshold = top * x.nrows().max(x.ncols()) as f64 * f64::EPSILON;
        let rank = s.iter().filter(|&&v| v > threshold).count();
        let k = if k > rank {
            log::warn!("LSI dimension {k} exceeds the rank {rank} of X; using {rank}");
            rank
        } else {
            k
        };
        let u = svd.u.expect("left singular vectors requested");
        let basis = u.select_columns(&order[..k]);
        Ok(Lsi {
            ids: data.doc_ids.clone(),
            vocabulary: vocabulary.clone(),
            weighting: data.weighting,
            idf: data.idf_x.clone(),
            docs: basis.tr_mul(x),
            basis,
            singular_values: s[..k].to_vec(),
        })
    }

    pub fn k(&self) -> usize {
        self.basis.ncols()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `U_k U_kᵀ X`, the rank-k reconstruction.
    pub fn reconstruction(&self) -> DMatrix<f64> {
        &self.basis * &self.docs
    }
}

impl Ranker for Lsi {
    fn rank(&self, tokens: &[String]) -> Vec<String> {
        let q = crate::retrieval::vectorize_query(tokens, &self.vocabulary, &self.idf, self.weighting);
        let pq = self.basis.tr_mul(&q.vector);
        let scores: Vec<f64> = (0..self.ids.len()).map(|j| cosine(&pq, self.docs.column(j))).collect();
        order(&self.ids, &scores)
    }
}
