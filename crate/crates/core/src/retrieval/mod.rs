//! Ranking documents for a query by an ensemble of text-text and text-code
//! cosine similarity, plus the word/feature relatedness view.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vectorize::{DataMatrices, FeatureIndex, Vocabulary, Weighting};

/// A query in the corpus word space.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryVector {
    pub vector: DVector<f64>,
    /// Tokens dropped because the corpus vocabulary lacks them.
    pub out_of_vocabulary: usize,
}

/// Counts of in-vocabulary tokens, weighted like the corpus columns (corpus
/// idf, unit length).
pub fn vectorize_query<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    idf: &DVector<f64>,
    weighting: Weighting,
) -> QueryVector {
    let mut vector = DVector::zeros(vocab.len());
    let mut oov = 0;
    for t in tokens {
        match vocab.get(t.as_ref()) {
            Some(i) => vector[i] += 1.0,
            None => oov += 1,
        }
    }
    if weighting == Weighting::TfIdf {
        vector.component_mul_assign(idf);
        let n = vector.norm();
        if n > 0.0 {
            vector /= n;
        }
    }
    QueryVector {
        vector,
        out_of_vocabulary: oov,
    }
}

/// Cosine similarity, 0 when either side is the zero vector.
pub fn cosine<'a, 'b>(
    a: impl Into<nalgebra::DVectorView<'a, f64>>,
    b: impl Into<nalgebra::DVectorView<'b, f64>>,
) -> f64 {
    let (a, b) = (a.into(), b.into());
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        a.dot(&b) / (na * nb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredResult {
    pub doc_id: String,
    pub text_text: f64,
    pub text_code: f64,
    pub score: f64,
}

/// Score descending, then document id ascending.
pub fn result_order(a: &ScoredResult, b: &ScoredResult) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// `rank<TAB>doc_id<TAB>score<TAB>text_text<TAB>text_code`, ranks from 1.
pub fn format_results(results: &[ScoredResult]) -> String {
    let mut out = String::new();
    for (i, r) in results.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            i + 1,
            r.doc_id,
            r.score,
            r.text_text,
            r.text_code
        );
    }
    out
}

/// Immutable index over a corpus and a trained projection pair.
#[derive(Debug, Clone)]
pub struct RetrievalIndex {
    doc_ids: Vec<String>,
    vocabulary: Vocabulary,
    weighting: Weighting,
    idf: DVector<f64>,
    /// Word columns of the documents.
    text: DMatrix<f64>,
    y: DMatrix<f64>,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    /// `VᵀY`, one k-vector per document.
    code_projection: DMatrix<f64>,
    alpha: f64,
}

impl RetrievalIndex {
    pub fn new(
        data: &DataMatrices,
        vocabulary: Vocabulary,
        u: DMatrix<f64>,
        v: DMatrix<f64>,
        alpha: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if u.nrows() != data.x.nrows() || v.nrows() != data.y.nrows() || u.ncols() != v.ncols() {
            return Err(Error::Dimension(format!(
                "model is {}x{} / {}x{} but the corpus has {} words and {} code features",
                u.nrows(),
                u.ncols(),
                v.nrows(),
                v.ncols(),
                data.x.nrows(),
                data.y.nrows()
            )));
        }
        if vocabulary.len() != data.x.nrows() {
            return Err(Error::Dimension("vocabulary does not match X".into()));
        }
        let code_projection = v.tr_mul(&data.y);
        Ok(RetrievalIndex {
            doc_ids: data.doc_ids.clone(),
            vocabulary,
            weighting: data.weighting,
            idf: data.idf_x.clone(),
            text: data.x.clone(),
            y: data.y.clone(),
            u,
            v,
            code_projection,
            alpha,
        })
    }

    /// Text-only index: zero projections and alpha 0.
    pub fn text_only(data: &DataMatrices, vocabulary: Vocabulary) -> Result<Self> {
        let u = DMatrix::zeros(data.x.nrows(), 1);
        let v = DMatrix::zeros(data.y.nrows(), 1);
        Self::new(data, vocabulary, u, v, 0.0)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(RetrievalIndex { alpha, ..self.clone() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// Whether the cached `VᵀY` still agrees with V and Y.
    pub fn projections_coherent(&self) -> bool {
        let fresh = self.v.tr_mul(&self.y);
        (fresh - &self.code_projection).abs().max() <= 1e-12 * self.code_projection.abs().max().max(1.0)
    }

    pub fn query_vector<S: AsRef<str>>(&self, tokens: &[S]) -> QueryVector {
        vectorize_query(tokens, &self.vocabulary, &self.idf, self.weighting)
    }

    pub fn text_text(&self, q: &QueryVector, doc: usize) -> f64 {
        cosine(&q.vector, self.text.column(doc))
    }

    pub fn text_code(&self, q: &QueryVector, doc: usize) -> f64 {
        let projected = self.u.tr_mul(&q.vector);
        cosine(&projected, self.code_projection.column(doc))
    }

    /// Every document, scored and ordered.
    pub fn score_all(&self, q: &QueryVector) -> Vec<ScoredResult> {
        let projected = self.u.tr_mul(&q.vector);
        let mut out: Vec<ScoredResult> = (0..self.len())
            .map(|j| {
                let text_text = cosine(&q.vector, self.text.column(j));
                let text_code = cosine(&projected, self.code_projection.column(j));
                ScoredResult {
                    doc_id: self.doc_ids[j].clone(),
                    text_text,
                    text_code,
                    score: (1.0 - self.alpha) * text_text + self.alpha * text_code,
                }
            })
            .collect();
        out.sort_by(result_order);
        out
    }

    pub fn rank(&self, q: &QueryVector, n: usize) -> Result<Vec<ScoredResult>> {
        if n == 0 {
            return Err(Error::InvalidArgument("cutoff n must be at least 1".into()));
        }
        let mut all = self.score_all(q);
        all.truncate(n);
        Ok(all)
    }

    pub fn rank_tokens<S: AsRef<str>>(&self, tokens: &[S], n: usize) -> Result<Vec<ScoredResult>> {
        let q = self.query_vector(tokens);
        if q.out_of_vocabulary > 0 {
            log::info!("{} query tokens are not in the corpus vocabulary", q.out_of_vocabulary);
        }
        self.rank(&q, n)
    }
}

/// The `t` keys closest to `key` by edit distance, ties broken by key.
pub fn closest_keys<'a>(key: &str, candidates: impl Iterator<Item = &'a str>, t: usize) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = candidates.map(|c| (strsim::levenshtein(key, c), c)).collect();
    scored.sort();
    scored.into_iter().take(t).map(|(_, c)| c.to_string()).collect()
}

/// The `t` words most related to a code feature: its column of `UVᵀ`,
/// highest first, ties by word.
pub fn top_words_for_feature(
    key: &str,
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    vocabulary: &Vocabulary,
    features: &FeatureIndex,
    t: usize,
) -> Result<Vec<(String, f64)>> {
    let Some(j) = features.get(key) else {
        return Err(Error::UnknownFeature {
            key: key.to_string(),
            suggestions: closest_keys(key, features.iter(), 3),
        });
    };
    let column = u * v.row(j).transpose();
    let mut scored: Vec<(String, f64)> = vocabulary
        .iter()
        .zip(column.iter())
        .map(|(w, &s)| (w.to_string(), s))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(t);
    Ok(scored)
}
