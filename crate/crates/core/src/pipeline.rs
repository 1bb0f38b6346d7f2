//! From ingested documents to everything training and ranking need.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::corpus::{fingerprint, CodeDocument, LanguageProfile};
use crate::error::Result;
use crate::features::{
    build_content_matrix, extract_features, filter_by_kind, ContentMatrix, DocumentFeatureMap, FeatureSet,
    FrequencyBounds,
};
use crate::hmlcr::Problem;
use crate::retrieval::RetrievalIndex;
use crate::vectorize::{build_label_graph, build_matrices, DataMatrices, FeatureIndex, Vocabulary, Weighting};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexOptions {
    /// Document-frequency bounds for snippet features; corpus default when
    /// absent.
    pub snippet_bounds: Option<(usize, usize)>,
    /// Bounds for relationship features; same as the snippet bounds when
    /// absent.
    pub relationship_bounds: Option<(usize, usize)>,
    pub weighting: Weighting,
}

impl IndexOptions {
    fn bounds(&self, m: usize) -> Result<(FrequencyBounds, FrequencyBounds)> {
        let snippet = match self.snippet_bounds {
            Some((lo, hi)) => FrequencyBounds::new(lo, hi)?,
            None => FrequencyBounds::default_for(m),
        };
        let relationship = match self.relationship_bounds {
            Some((lo, hi)) => FrequencyBounds::new(lo, hi)?,
            None => snippet,
        };
        Ok((snippet, relationship))
    }
}

#[derive(Debug, Clone)]
pub struct CorpusIndex {
    pub documents: Vec<CodeDocument>,
    pub vocabulary: Vocabulary,
    /// Features that survived frequency filtering.
    pub features: FeatureSet,
    pub feature_index: FeatureIndex,
    pub map: DocumentFeatureMap,
    pub data: DataMatrices,
    pub content: ContentMatrix,
    pub fingerprint: String,
    /// Documents whose block structure needed repair.
    pub unbalanced: Vec<String>,
}

impl CorpusIndex {
    pub fn build(documents: Vec<CodeDocument>, profile: &LanguageProfile, options: &IndexOptions) -> Result<Self> {
        let m = documents.len();
        let (snippet, relationship) = options.bounds(m)?;
        let extraction = extract_features(&documents, profile);
        let (features, map) = filter_by_kind(&extraction.features, &extraction.map, snippet, relationship)?;
        let vocabulary = Vocabulary::from_documents(&documents);
        let feature_index = FeatureIndex::from_keys(features.keys().map(String::from));
        let data = build_matrices(&documents, &map, &vocabulary, &feature_index, options.weighting)?;
        let content = build_content_matrix(&vocabulary, &feature_index, &features);
        log::info!(
            "indexed {m} documents: {} words, {} code features ({} candidates), {} content links",
            vocabulary.len(),
            feature_index.len(),
            extraction.features.len(),
            content.nnz()
        );
        Ok(CorpusIndex {
            fingerprint: fingerprint(&documents),
            documents,
            vocabulary,
            features,
            feature_index,
            map,
            data,
            content,
            unbalanced: extraction.unbalanced,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn position(&self, doc_id: &str) -> Option<usize> {
        self.data.doc_ids.iter().position(|d| d == doc_id)
    }

    /// The training problem over the given document columns. Feature spaces
    /// and R stay those of the whole corpus.
    pub fn problem(&self, columns: &[usize]) -> Result<Problem> {
        let labels: Vec<&str> = columns.iter().map(|&c| self.documents[c].label.as_str()).collect();
        let graph = build_label_graph(&labels);
        Problem::new(
            self.data.x.select_columns(columns),
            self.data.y.select_columns(columns),
            graph.blocks(),
            self.content.to_dense(),
        )
    }

    pub fn full_problem(&self) -> Result<Problem> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.problem(&all)
    }

    pub fn retrieval_index(&self, u: DMatrix<f64>, v: DMatrix<f64>, alpha: f64) -> Result<RetrievalIndex> {
        RetrievalIndex::new(&self.data, self.vocabulary.clone(), u, v, alpha)
    }

    pub fn text_index(&self) -> Result<RetrievalIndex> {
        RetrievalIndex::text_only(&self.data, self.vocabulary.clone())
    }

    /// One token per line.
    pub fn vocabulary_dump(&self) -> String {
        let mut out = String::new();
        for t in self.vocabulary.iter() {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}
