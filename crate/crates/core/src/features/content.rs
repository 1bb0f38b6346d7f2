//! The binary word/feature content matrix R.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::FeatureSet;
use crate::vectorize::{FeatureIndex, Vocabulary};

/// Sparse 0/1 matrix of size `vocabulary × features`: entry (i, j) is one
/// iff word i is among the surface words of feature j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentMatrix {
    pub rows: usize,
    pub cols: usize,
    /// (row, column) of every one, sorted.
    ones: Vec<(usize, usize)>,
}

impl ContentMatrix {
    pub fn from_ones(rows: usize, cols: usize, mut ones: Vec<(usize, usize)>) -> Self {
        ones.sort_unstable();
        ones.dedup();
        assert!(ones.iter().all(|&(r, c)| r < rows && c < cols), "entry out of range");
        ContentMatrix { rows, cols, ones }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ContentMatrix {
            rows,
            cols,
            ones: Vec::new(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.ones.binary_search(&(row, col)).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.ones.len()
    }

    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c) in &self.ones {
            m[(r, c)] = 1.0;
        }
        m
    }

    /// Sparsity dump: header `sparse <rows> <cols> <nnz>`, then one
    /// `row<TAB>col` line per one.
    pub fn to_dump(&self) -> String {
        let mut out = format!("sparse {} {} {}\n", self.rows, self.cols, self.ones.len());
        for (r, c) in &self.ones {
            let _ = writeln!(out, "{r}\t{c}");
        }
        out
    }

    pub fn from_dump(text: &str) -> crate::Result<Self> {
        let bad = |m: &str| crate::Error::format("content matrix dump", m.to_string());
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 4 || header[0] != "sparse" {
            return Err(bad("bad header"));
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
        let (rows, cols, nnz) = (parse(header[1])?, parse(header[2])?, parse(header[3])?);
        let mut ones = Vec::with_capacity(nnz);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (r, c) = line.split_once('\t').ok_or_else(|| bad("bad entry"))?;
            let (r, c) = (parse(r)?, parse(c)?);
            if r >= rows || c >= cols {
                return Err(bad("entry out of range"));
            }
            ones.push((r, c));
        }
        if ones.len() != nnz {
            return Err(bad("entry count does not match header"));
        }
        Ok(Self::from_ones(rows, cols, ones))
    }
}

/// Builds R over the final vocabulary and feature index.
pub fn build_content_matrix(vocab: &Vocabulary, index: &FeatureIndex, features: &FeatureSet) -> ContentMatrix {
    let mut ones = Vec::new();
    for (col, key) in index.iter().enumerate() {
        let Some(feature) = features.get(key) else { continue };
        for word in &feature.surface_words {
            if let Some(row) = vocab.get(word) {
                ones.push((row, col));
            }
        }
    }
    ContentMatrix::from_ones(vocab.len(), index.len(), ones)
}
