//! Aligned data matrices and the two-view label graph.

mod dense;
mod graph;

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::corpus::CodeDocument;
use crate::error::{Error, Result};
use crate::features::DocumentFeatureMap;
pub use dense::{parse_dense, read_dense, write_dense};
pub use graph::{build_label_graph, normalized_laplacian, LabelGraph, LaplacianBlocks};

/// Sorted, dense string index shared by [`Vocabulary`] and [`FeatureIndex`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct SortedIndex {
    items: Vec<String>,
    positions: HashMap<String, usize>,
}

impl SortedIndex {
    fn new<I: IntoIterator<Item = String>>(items: I) -> Self {
        let set: BTreeSet<String> = items.into_iter().collect();
        let items: Vec<String> = set.into_iter().collect();
        let positions = items.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        SortedIndex { items, positions }
    }
}

/// Word features, indexed in sorted token order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary(SortedIndex);

impl Vocabulary {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vocabulary(SortedIndex::new(tokens.into_iter().map(Into::into)))
    }

    pub fn from_documents(docs: &[CodeDocument]) -> Self {
        Self::from_tokens(docs.iter().flat_map(|d| d.tokens.iter().cloned()))
    }

    pub fn len(&self) -> usize {
        self.0.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.items.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.0.positions.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.0.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.items.iter().map(String::as_str)
    }
}

/// Code features, indexed in sorted key order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureIndex(SortedIndex);

impl FeatureIndex {
    pub fn from_keys<I: IntoIterator<Item = String>>(keys: I) -> Self {
        FeatureIndex(SortedIndex::new(keys))
    }

    pub fn len(&self) -> usize {
        self.0.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.items.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<usize> {
        self.0.positions.get(key).copied()
    }

    pub fn key(&self, index: usize) -> &str {
        &self.0.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.items.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Raw occurrence counts.
    Count,
    /// `tf * ln(m / df)`, columns scaled to unit L2 norm.
    #[default]
    TfIdf,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Weighting::Count),
            "tf-idf" | "tfidf" => Ok(Weighting::TfIdf),
            other => Err(Error::InvalidArgument(format!("unknown weighting `{other}`"))),
        }
    }
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Count => "count",
            Weighting::TfIdf => "tf-idf",
        }
    }
}

/// X (words × documents) and Y (code features × documents), column j of both
/// describing document j.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrices {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub doc_ids: Vec<String>,
    pub weighting: Weighting,
    /// Per-word inverse document frequency, reused for query vectors.
    pub idf_x: DVector<f64>,
    pub idf_y: DVector<f64>,
    /// Columns of X that are entirely zero.
    pub empty_text: Vec<usize>,
}

impl DataMatrices {
    pub fn documents(&self) -> usize {
        self.doc_ids.len()
    }

    /// Keeps only the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> DataMatrices {
        DataMatrices {
            x: self.x.select_columns(columns),
            y: self.y.select_columns(columns),
            doc_ids: columns.iter().map(|&c| self.doc_ids[c].clone()).collect(),
            weighting: self.weighting,
            idf_x: self.idf_x.clone(),
            idf_y: self.idf_y.clone(),
            empty_text: columns
                .iter()
                .enumerate()
                .filter(|(_, c)| self.empty_text.contains(c))
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

fn idf(df: &[usize], m: usize) -> DVector<f64> {
    DVector::from_iterator(
        df.len(),
        df.iter()
            .map(|&d| if d == 0 { 0.0 } else { (m as f64 / d as f64).ln() }),
    )
}

fn apply_weighting(counts: &mut DMatrix<f64>, idf: &DVector<f64>, weighting: Weighting) {
    if weighting == Weighting::Count {
        return;
    }
    for mut col in counts.column_iter_mut() {
        col.component_mul_assign(idf);
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
}

/// Builds X and Y over `docs` in the given order.
pub fn build_matrices(
    docs: &[CodeDocument],
    map: &DocumentFeatureMap,
    vocab: &Vocabulary,
    features: &FeatureIndex,
    weighting: Weighting,
) -> Result<DataMatrices> {
    let m = docs.len();
    let mut x = DMatrix::zeros(vocab.len(), m);
    let mut y = DMatrix::zeros(features.len(), m);
    let mut df_x = vec![0usize; vocab.len()];
    let mut df_y = vec![0usize; features.len()];

    for (j, doc) in docs.iter().enumerate() {
        for t in &doc.tokens {
            let i = vocab
                .get(t)
                .ok_or_else(|| Error::Dimension(format!("token `{t}` of {} is not in the vocabulary", doc.id)))?;
            x[(i, j)] += 1.0;
        }
        if let Some(keys) = map.get(&doc.id) {
            for (key, &count) in keys {
                let i = features.get(key).ok_or_else(|| {
                    Error::Dimension(format!("feature `{key}` of {} is not in the feature index", doc.id))
                })?;
                y[(i, j)] += count as f64;
            }
        }
    }
    for (i, df) in df_x.iter_mut().enumerate() {
        *df = x.row(i).iter().filter(|v| **v > 0.0).count();
    }
    for (i, df) in df_y.iter_mut().enumerate() {
        *df = y.row(i).iter().filter(|v| **v > 0.0).count();
    }
    let idf_x = idf(&df_x, m);
    let idf_y = idf(&df_y, m);
    apply_weighting(&mut x, &idf_x, weighting);
    apply_weighting(&mut y, &idf_y, weighting);

    let empty_text = (0..m)
        .filter(|&j| x.column(j).iter().all(|v| *v == 0.0))
        .collect::<Vec<_>>();
    for &j in &empty_text {
        log::warn!("{}: document has no weighted text features", docs[j].id);
    }
    Ok(DataMatrices {
        x,
        y,
        doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
        weighting,
        idf_x,
        idf_y,
        empty_text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LanguageProfile;

    fn doc(id: &str, tokens: &[&str]) -> CodeDocument {
        let mut d = CodeDocument::from_source(id, id, "", &LanguageProfile::java());
        d.tokens = tokens.iter().map(|s| s.to_string()).collect();
        d
    }

    #[test]
    fn count_column() {
        let docs = [doc("d", &["a", "a", "b"])];
        let vocab = Vocabulary::from_documents(&docs);
        let m = build_matrices(
            &docs,
            &DocumentFeatureMap::default(),
            &vocab,
            &FeatureIndex::default(),
            Weighting::Count,
        )
        .unwrap();
        assert_eq!(m.x.column(0).as_slice(), &[2.0, 1.0]);
    }

    #[test]
    fn document_absent_from_map_has_zero_code_column() {
        let docs = [doc("d1", &["a"]), doc("d2", &["a"])];
        let mut map = DocumentFeatureMap::default();
        map.record("d1", "f");
        let index = FeatureIndex::from_keys(["f".to_string()]);
        let m = build_matrices(
            &docs,
            &map,
            &Vocabulary::from_documents(&docs),
            &index,
            Weighting::Count,
        )
        .unwrap();
        assert_eq!(m.y[(0, 0)], 1.0);
        assert_eq!(m.y[(0, 1)], 0.0);
    }

    #[test]
    fn tf_idf_matches_hand_computation() {
        // d1 = {a, a, b}, d2 = {b, c}; m = 2
        // idf: a = ln 2, b = 0, c = ln 2
        // d1 raw = (2 ln2, 0, 0) -> (1, 0, 0); d2 raw = (0, 0, ln2) -> (0, 0, 1)
        let docs = [doc("d1", &["a", "a", "b"]), doc("d2", &["b", "c"])];
        let vocab = Vocabulary::from_documents(&docs);
        let m = build_matrices(
            &docs,
            &DocumentFeatureMap::default(),
            &vocab,
            &FeatureIndex::default(),
            Weighting::TfIdf,
        )
        .unwrap();
        let expected = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((m.x.clone() - expected).abs().max() < 1e-15);
        assert!((m.idf_x[0] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn tf_idf_normalizes_columns() {
        // d1 = {a, a, b, c}, d2 = {c, d}; idf a = b = d = ln 2, c = 0
        // d1 raw = (2 ln2, ln2, 0, 0) -> (2, 1, 0, 0) / sqrt 5
        let docs = [doc("d1", &["a", "a", "b", "c"]), doc("d2", &["c", "d"])];
        let vocab = Vocabulary::from_documents(&docs);
        let m = build_matrices(
            &docs,
            &DocumentFeatureMap::default(),
            &vocab,
            &FeatureIndex::default(),
            Weighting::TfIdf,
        )
        .unwrap();
        let s5 = 5f64.sqrt();
        let expected = DMatrix::from_column_slice(4, 2, &[2.0 / s5, 1.0 / s5, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((m.x.clone() - expected).abs().max() < 1e-15);
    }

    #[test]
    fn unknown_token_is_a_dimension_error() {
        let docs = [doc("d", &["a"])];
        let vocab = Vocabulary::from_tokens(["b"]);
        let err = build_matrices(
            &docs,
            &DocumentFeatureMap::default(),
            &vocab,
            &FeatureIndex::default(),
            Weighting::Count,
        );
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn empty_text_columns_are_flagged() {
        let docs = [doc("d1", &["a"]), doc("d2", &[])];
        let m = build_matrices(
            &docs,
            &DocumentFeatureMap::default(),
            &Vocabulary::from_documents(&docs),
            &FeatureIndex::default(),
            Weighting::Count,
        )
        .unwrap();
        assert_eq!(m.empty_text, [1]);
    }

    #[test]
    fn indices_are_sorted_and_dense() {
        let v = Vocabulary::from_tokens(["zeta", "alpha", "mid", "alpha"]);
        assert_eq!(v.iter().collect::<Vec<_>>(), ["alpha", "mid", "zeta"]);
        assert_eq!(v.get("mid"), Some(1));
        assert_eq!(v.token(2), "zeta");
    }
}
