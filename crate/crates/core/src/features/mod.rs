//! Code features: relationship links and block-structured snippets.
//!
//! Every block of a program that owns at least one statement yields a
//! snippet feature keyed by the normalized text of its subtree, collected
//! from the leaves up to the root. Relationship features are
//! `inherits:`/`implements:`/`refs:` links found by pattern matching. Both
//! kinds land in one candidate set, which is filtered by document frequency
//! before the content matrix is built.

pub mod block_tree;
pub mod content;
pub mod normalize;
pub mod relationships;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::{strip, CodeDocument, LanguageProfile};
use crate::error::{Error, Result};
pub use block_tree::{build_block_tree, BlockNode, BlockTree, Item, Statement};
pub use content::{build_content_matrix, ContentMatrix};
pub use normalize::{normalize_statement, Normalizer};
pub use relationships::{extract_relationships_from_code, RelationKind, Relationship};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    Relationship,
    Snippet,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Relationship => "relationship",
            FeatureKind::Snippet => "snippet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFeature {
    pub kind: FeatureKind,
    pub key: String,
    /// Words this feature contributes to the content matrix. For snippets,
    /// only words owned at the snippet's own level (never words owned by a
    /// nested block).
    pub surface_words: BTreeSet<String>,
    /// Number of documents containing the feature.
    pub document_frequency: usize,
}

/// The candidate set F, keyed by canonical feature key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet {
    features: BTreeMap<String, CodeFeature>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&CodeFeature> {
        self.features.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.features.contains_key(key)
    }

    /// Features in key order.
    pub fn iter(&self) -> impl Iterator<Item = &CodeFeature> {
        self.features.values()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.features.keys().map(String::as_str)
    }

    /// Adds a candidate occurrence. A new key is inserted once; a known key
    /// accumulates surface words.
    fn add(&mut self, kind: FeatureKind, key: &str, words: &BTreeSet<String>) {
        match self.features.get_mut(key) {
            Some(f) => f.surface_words.extend(words.iter().cloned()),
            None => {
                self.features.insert(
                    key.to_string(),
                    CodeFeature {
                        kind,
                        key: key.to_string(),
                        surface_words: words.clone(),
                        document_frequency: 0,
                    },
                );
            }
        }
    }

    /// One feature per line: `kind<TAB>key<TAB>document-frequency`.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for f in self.iter() {
            let _ = writeln!(out, "{}\t{}\t{}", f.kind.as_str(), f.key, f.document_frequency);
        }
        out
    }
}

/// The map M from document id to the multiset of its feature keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentFeatureMap {
    map: BTreeMap<String, BTreeMap<String, usize>>,
}

impl DocumentFeatureMap {
    pub fn get(&self, doc_id: &str) -> Option<&BTreeMap<String, usize>> {
        self.map.get(doc_id)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeMap<String, usize>)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn record(&mut self, doc_id: &str, key: &str) {
        *self
            .map
            .entry(doc_id.to_string())
            .or_default()
            .entry(key.to_string())
            .or_insert(0) += 1;
    }

    fn document_frequencies(&self) -> BTreeMap<&str, usize> {
        let mut df = BTreeMap::new();
        for keys in self.map.values() {
            for k in keys.keys() {
                *df.entry(k.as_str()).or_insert(0) += 1;
            }
        }
        df
    }
}

/// Features of one document, before merging.
#[derive(Debug, Clone, Default)]
pub struct DocumentFeatures {
    /// (key, surface words) per block that owns statements, leaves first.
    pub snippets: Vec<(String, BTreeSet<String>)>,
    pub relationships: Vec<Relationship>,
    pub unbalanced: bool,
}

pub fn document_features(doc: &CodeDocument, profile: &LanguageProfile) -> DocumentFeatures {
    let stripped = strip(&doc.source, profile);
    let tree = build_block_tree(&stripped.code(), profile);
    let snippets = snippet_candidates(&tree, profile);
    let relationships = extract_relationships_from_code(&stripped.code_with_literals(), profile);
    DocumentFeatures {
        snippets,
        relationships,
        unbalanced: tree.unbalanced,
    }
}

/// Bottom-up snippet candidates of one tree.
pub fn snippet_candidates(tree: &BlockTree, profile: &LanguageProfile) -> Vec<(String, BTreeSet<String>)> {
    tree.root
        .post_order()
        .into_iter()
        .filter(|n| n.owns_statements())
        .map(|n| (n.subtree_key(), n.surface_words(profile)))
        .collect()
}

pub fn extract_relationships(doc: &CodeDocument, profile: &LanguageProfile) -> Vec<CodeFeature> {
    let stripped = strip(&doc.source, profile);
    extract_relationships_from_code(&stripped.code_with_literals(), profile)
        .into_iter()
        .map(|r| CodeFeature {
            kind: FeatureKind::Relationship,
            key: r.key(),
            surface_words: r.surface_words(profile),
            document_frequency: 1,
        })
        .collect()
}

/// Output of feature extraction over a corpus.
#[derive(Debug, Clone, Default)]
pub struct FeatureExtraction {
    pub features: FeatureSet,
    pub map: DocumentFeatureMap,
    /// Documents whose block delimiters did not balance.
    pub unbalanced: Vec<String>,
}

fn merge(
    docs: &[CodeDocument],
    per_doc: Vec<DocumentFeatures>,
    profile: &LanguageProfile,
    include_snippets: bool,
    include_relationships: bool,
) -> FeatureExtraction {
    let mut out = FeatureExtraction::default();
    for (doc, feats) in docs.iter().zip(per_doc) {
        if feats.unbalanced {
            log::warn!("{}: unbalanced block delimiters, tree repaired", doc.id);
            out.unbalanced.push(doc.id.clone());
        }
        if include_snippets {
            for (key, words) in &feats.snippets {
                out.features.add(FeatureKind::Snippet, key, words);
                out.map.record(&doc.id, key);
            }
        }
        if include_relationships {
            for r in &feats.relationships {
                let key = r.key();
                out.features
                    .add(FeatureKind::Relationship, &key, &r.surface_words(profile));
                out.map.record(&doc.id, &key);
            }
        }
    }
    let df = out.map.document_frequencies();
    for (key, f) in out.features.features.iter_mut() {
        f.document_frequency = df.get(key.as_str()).copied().unwrap_or(0);
    }
    out
}

/// Snippet candidate set F and document map M over a corpus.
pub fn extract_snippet_candidates(
    docs: &[CodeDocument],
    profile: &LanguageProfile,
) -> (FeatureSet, DocumentFeatureMap) {
    let per_doc: Vec<DocumentFeatures> = docs.par_iter().map(|d| document_features(d, profile)).collect();
    let out = merge(docs, per_doc, profile, true, false);
    (out.features, out.map)
}

/// Snippet and relationship features of a corpus.
pub fn extract_features(docs: &[CodeDocument], profile: &LanguageProfile) -> FeatureExtraction {
    let per_doc: Vec<DocumentFeatures> = docs.par_iter().map(|d| document_features(d, profile)).collect();
    merge(docs, per_doc, profile, true, true)
}

/// Inclusive document-frequency bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyBounds {
    pub lower: usize,
    pub upper: usize,
}

impl FrequencyBounds {
    pub fn new(lower: usize, upper: usize) -> Result<Self> {
        if lower < 1 || lower > upper {
            return Err(Error::InvalidBounds { lower, upper });
        }
        Ok(FrequencyBounds { lower, upper })
    }

    /// Lower bound 2, upper bound half the corpus (at least 2).
    pub fn default_for(corpus_size: usize) -> Self {
        FrequencyBounds {
            lower: 2,
            upper: (corpus_size / 2).max(2),
        }
    }

    pub fn unbounded() -> Self {
        FrequencyBounds {
            lower: 1,
            upper: usize::MAX,
        }
    }

    pub fn admits(&self, df: usize) -> bool {
        self.lower <= df && df <= self.upper
    }
}

/// Keeps a feature iff its document frequency lies within the bounds for its
/// kind; M is restricted to the surviving keys.
pub fn filter_by_kind(
    features: &FeatureSet,
    map: &DocumentFeatureMap,
    snippet: FrequencyBounds,
    relationship: FrequencyBounds,
) -> Result<(FeatureSet, DocumentFeatureMap)> {
    for b in [snippet, relationship] {
        FrequencyBounds::new(b.lower, b.upper)?;
    }
    let kept: BTreeMap<String, CodeFeature> = features
        .features
        .iter()
        .filter(|(_, f)| match f.kind {
            FeatureKind::Snippet => snippet.admits(f.document_frequency),
            FeatureKind::Relationship => relationship.admits(f.document_frequency),
        })
        .map(|(k, f)| (k.clone(), f.clone()))
        .collect();
    if kept.is_empty() {
        return Err(Error::AllFeaturesFiltered {
            lower: snippet.lower,
            upper: snippet.upper,
        });
    }
    let mut restricted = DocumentFeatureMap::default();
    for (doc, keys) in &map.map {
        let keys: BTreeMap<String, usize> = keys
            .iter()
            .filter(|(k, _)| kept.contains_key(*k))
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        if !keys.is_empty() {
            restricted.map.insert(doc.clone(), keys);
        }
    }
    Ok((FeatureSet { features: kept }, restricted))
}

pub fn filter_by_frequency(
    features: &FeatureSet,
    map: &DocumentFeatureMap,
    bounds: FrequencyBounds,
) -> Result<(FeatureSet, DocumentFeatureMap)> {
    filter_by_kind(features, map, bounds, bounds)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn doc(id: &str, src: &str) -> CodeDocument {
        CodeDocument::from_source(id, id, src, &LanguageProfile::java())
    }

    #[test]
    fn four_distinct_nodes_four_candidates() {
        let d = doc("a.java", "setup(); { first(); { second(); } } { third(); }");
        let (f, m) = extract_snippet_candidates(&[d], &LanguageProfile::java());
        assert_eq!(f.len(), 4);
        assert_eq!(m.get("a.java").unwrap().values().sum::<usize>(), 4);
    }

    #[test]
    fn identical_documents_dedupe_in_f() {
        let src = "a(); { b(); }";
        let (f1, _) = extract_snippet_candidates(&[doc("x", src)], &LanguageProfile::java());
        let (f2, m2) = extract_snippet_candidates(&[doc("x", src), doc("y", src)], &LanguageProfile::java());
        assert_eq!(f1.keys().collect::<Vec<_>>(), f2.keys().collect::<Vec<_>>());
        assert_eq!(m2.len(), 2);
        assert!(f2.iter().all(|f| f.document_frequency == 2));
    }

    #[test]
    fn empty_corpus() {
        let (f, m) = extract_snippet_candidates(&[], &LanguageProfile::java());
        assert!(f.is_empty() && m.is_empty());
    }

    #[test]
    fn multiplicity_recorded() {
        let d = doc("a", "{ go(); } { go(); }");
        let (f, m) = extract_snippet_candidates(&[d], &LanguageProfile::java());
        assert_eq!(f.len(), 1);
        assert_eq!(m.get("a").unwrap()["go ( ) ;"], 2);
    }

    fn df_fixture() -> (FeatureSet, DocumentFeatureMap) {
        // a in 1 doc, b in 3, c in 9
        let mut f = FeatureSet::default();
        let mut m = DocumentFeatureMap::default();
        let none = BTreeSet::new();
        for (key, n) in [("a", 1), ("b", 3), ("c", 9)] {
            f.add(FeatureKind::Snippet, key, &none);
            for d in 0..n {
                m.record(&format!("d{d}"), key);
            }
        }
        let df = m.document_frequencies();
        for (k, feat) in f.features.iter_mut() {
            feat.document_frequency = df[k.as_str()];
        }
        (f, m)
    }

    #[test]
    fn bounds_keep_the_middle() {
        let (f, m) = df_fixture();
        let (f2, m2) = filter_by_frequency(&f, &m, FrequencyBounds::new(2, 5).unwrap()).unwrap();
        assert_eq!(f2.keys().collect::<Vec<_>>(), ["b"]);
        assert_eq!(m2.len(), 3);
    }

    #[test]
    fn lower_bound_removes_rare() {
        let (f, m) = df_fixture();
        let (f2, _) = filter_by_frequency(&f, &m, FrequencyBounds::new(2, usize::MAX).unwrap()).unwrap();
        assert!(!f2.contains("a"));
    }

    #[test]
    fn vacuous_bounds_are_identity() {
        let (f, m) = df_fixture();
        let (f2, m2) = filter_by_frequency(&f, &m, FrequencyBounds::unbounded()).unwrap();
        assert_eq!(f, f2);
        assert_eq!(m, m2);
    }

    #[test]
    fn everything_filtered_is_fatal() {
        let (f, m) = df_fixture();
        let err = filter_by_frequency(&f, &m, FrequencyBounds::new(20, 30).unwrap());
        assert!(matches!(err, Err(Error::AllFeaturesFiltered { .. })));
        assert!(FrequencyBounds::new(3, 2).is_err());
        assert!(FrequencyBounds::new(0, 2).is_err());
    }

    #[test]
    fn dump_format() {
        let (f, _) = df_fixture();
        assert_eq!(f.to_dump(), "snippet\ta\t1\nsnippet\tb\t3\nsnippet\tc\t9\n");
    }

    #[test]
    fn relationship_features_of_a_document() {
        let d = doc("a", "import java.io.InputStream;\nclass A extends B implements C { }");
        let mut keys: Vec<String> = extract_relationships(&d, &LanguageProfile::java())
            .into_iter()
            .map(|f| f.key)
            .collect();
        keys.sort();
        assert_eq!(keys, ["implements:c", "inherits:b", "refs:java.io.inputstream"]);
    }

    proptest! {
        #[test]
        fn one_candidate_per_statement_owning_node(src in "[a-c(); {}]{0,40}") {
            let p = LanguageProfile::java();
            let tree = build_block_tree(&src, &p);
            let owning = tree.root.post_order().into_iter().filter(|n| n.owns_statements()).count();
            prop_assert_eq!(snippet_candidates(&tree, &p).len(), owning);
        }

        #[test]
        fn surface_words_disjoint_from_ancestors(src in "(x[a-d]{1,3}\\(\\); ?|\\{ ?|\\} ?){0,14}") {
            let p = LanguageProfile::java();
            let tree = build_block_tree(&src, &p);
            fn check(node: &BlockNode, ancestors: &mut Vec<BTreeSet<String>>, p: &LanguageProfile) -> bool {
                let mine = node.surface_words(p);
                if ancestors.iter().any(|a| !a.is_disjoint(&mine)) {
                    return false;
                }
                ancestors.push(mine);
                let ok = node.children().all(|c| check(c, ancestors, p));
                ancestors.pop();
                ok
            }
            prop_assert!(check(&tree.root, &mut Vec::new(), &p));
        }

        #[test]
        fn raising_lower_never_adds(lo in 1usize..6, extra in 0usize..4, hi in 14usize..20) {
            let (f, m) = df_fixture();
            let wide = filter_by_frequency(&f, &m, FrequencyBounds::new(lo, hi).unwrap());
            let narrow = filter_by_frequency(&f, &m, FrequencyBounds::new(lo + extra, hi - extra).unwrap());
            let wide_keys: BTreeSet<String> = wide.map(|(f, _)| f.keys().map(String::from).collect()).unwrap_or_default();
            let narrow_keys: BTreeSet<String> = narrow.map(|(f, _)| f.keys().map(String::from).collect()).unwrap_or_default();
            prop_assert!(narrow_keys.is_subset(&wide_keys));
        }
    }
}
