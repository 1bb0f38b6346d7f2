//! Ranking metrics with binary relevance.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

fn hits<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, n: usize) -> usize {
    ranked.iter().take(n).filter(|d| relevant.contains(d.as_ref())).count()
}

/// `|top-n ∩ relevant| / n`
pub fn precision_at_n<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, n: usize) -> f64 {
    assert!(n >= 1, "cutoff must be at least 1");
    hits(ranked, relevant, n) as f64 / n as f64
}

/// `|top-n ∩ relevant| / |relevant|`
pub fn recall_at_n<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, n: usize) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::EmptyRelevantSet);
    }
    Ok(hits(ranked, relevant, n) as f64 / relevant.len() as f64)
}

/// `rel_1 + Σ_{i=2..p} rel_i / log2(i)`
pub fn dcg(relevance: &[f64], p: usize) -> f64 {
    relevance
        .iter()
        .take(p)
        .enumerate()
        .map(|(i, &r)| if i == 0 { r } else { r / ((i + 1) as f64).log2() })
        .sum()
}

/// DCG over the ideal ordering, 0 when nothing is relevant.
pub fn ndcg_at_p<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, p: usize) -> f64 {
    assert!(p >= 1, "cutoff must be at least 1");
    let rel: Vec<f64> = ranked
        .iter()
        .map(|d| if relevant.contains(d.as_ref()) { 1.0 } else { 0.0 })
        .collect();
    let ideal = vec![1.0; relevant.len()];
    let idcg = dcg(&ideal, p);
    if idcg == 0.0 {
        0.0
    } else {
        dcg(&rel, p) / idcg
    }
}
