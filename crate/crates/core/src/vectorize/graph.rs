//! Label graph over the stacked text and code views of the documents.
//!
//! Vertices 0..m are the text views of documents 0..m, vertices m..2m the
//! code views of the same documents in the same order. Two distinct vertices
//! are linked iff their labels are equal, so each document's two views are
//! always linked to each other.

use nalgebra::{DMatrix, DVector};

/// The four m × m blocks of the normalized Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianBlocks {
    pub xx: DMatrix<f64>,
    pub xy: DMatrix<f64>,
    pub yx: DMatrix<f64>,
    pub yy: DMatrix<f64>,
}

impl LaplacianBlocks {
    pub fn zeros(m: usize) -> Self {
        LaplacianBlocks {
            xx: DMatrix::zeros(m, m),
            xy: DMatrix::zeros(m, m),
            yx: DMatrix::zeros(m, m),
            yy: DMatrix::zeros(m, m),
        }
    }

    pub fn from_laplacian(l: &DMatrix<f64>) -> Self {
        assert!(l.is_square() && l.nrows() % 2 == 0, "Laplacian must be 2m x 2m");
        let m = l.nrows() / 2;
        LaplacianBlocks {
            xx: l.view((0, 0), (m, m)).into_owned(),
            xy: l.view((0, m), (m, m)).into_owned(),
            yx: l.view((m, 0), (m, m)).into_owned(),
            yy: l.view((m, m), (m, m)).into_owned(),
        }
    }

    pub fn documents(&self) -> usize {
        self.xx.nrows()
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let m = self.documents();
        let mut l = DMatrix::zeros(2 * m, 2 * m);
        l.view_mut((0, 0), (m, m)).copy_from(&self.xx);
        l.view_mut((0, m), (m, m)).copy_from(&self.xy);
        l.view_mut((m, 0), (m, m)).copy_from(&self.yx);
        l.view_mut((m, m), (m, m)).copy_from(&self.yy);
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelGraph {
    pub w: DMatrix<f64>,
    pub degrees: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

impl LabelGraph {
    pub fn documents(&self) -> usize {
        self.w.nrows() / 2
    }

    pub fn blocks(&self) -> LaplacianBlocks {
        LaplacianBlocks::from_laplacian(&self.laplacian)
    }
}

/// `I - D^{-1/2} W D^{-1/2}`. An isolated vertex gets `D^{-1/2} = 0`, which
/// leaves a 1 on its diagonal.
pub fn normalized_laplacian(w: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = w.nrows();
    let degrees = DVector::from_iterator(n, w.row_iter().map(|r| r.sum()));
    let inv_sqrt = degrees.map(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 });
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = w[(i, j)];
            if v != 0.0 {
                l[(i, j)] -= inv_sqrt[i] * v * inv_sqrt[j];
            }
        }
    }
    (degrees, l)
}

/// Builds W, D and the normalized Laplacian for documents with the given
/// labels, each duplicated over the two views.
pub fn build_label_graph<S: AsRef<str>>(labels: &[S]) -> LabelGraph {
    let m = labels.len();
    let n = 2 * m;
    let label = |i: usize| labels[i % m].as_ref();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && label(i) == label(j) {
                w[(i, j)] = 1.0;
            }
        }
    }
    let (degrees, laplacian) = normalized_laplacian(&w);
    LabelGraph { w, degrees, laplacian }
}

#[cfg(test)]
mod tests {
    use nalgebra::SymmetricEigen;

    use super::*;

    #[test]
    fn single_document() {
        let g = build_label_graph(&["a"]);
        assert_eq!(g.w, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(g.degrees.as_slice(), &[1.0, 1.0]);
        assert_eq!(g.laplacian, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn distinct_labels_couple_only_view_pairs() {
        let g = build_label_graph(&["a", "b"]);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i != j && i % 2 == j % 2 { 1.0 } else { 0.0 };
                assert_eq!(g.w[(i, j)], expected, "w[{i}][{j}]");
            }
        }
        let b = g.blocks();
        assert_eq!(b.xx, DMatrix::identity(2, 2));
        assert_eq!(b.xy, -DMatrix::identity(2, 2));
    }

    #[test]
    fn shared_label_three_documents() {
        let g = build_label_graph(&["a", "a", "b"]);
        // views of label a: 0, 1, 3, 4 -> degree 3; views of b: 2, 5 -> degree 1
        assert_eq!(g.degrees.as_slice(), &[3.0, 3.0, 1.0, 3.0, 3.0, 1.0]);
        assert_eq!(g.w[(0, 4)], 1.0);
        assert_eq!(g.w[(2, 5)], 1.0);
        assert_eq!(g.w[(0, 2)], 0.0);
        assert!((g.laplacian[(0, 1)] + 1.0 / 3.0).abs() < 1e-15);
        let eig = SymmetricEigen::new(g.laplacian.clone());
        assert!(eig.eigenvalues.iter().all(|e| (-1e-12..=2.0 + 1e-12).contains(e)));
        // one zero eigenvalue per connected component
        assert_eq!(eig.eigenvalues.iter().filter(|e| e.abs() < 1e-12).count(), 2);
    }

    #[test]
    fn isolated_vertex_keeps_unit_diagonal() {
        let mut w = DMatrix::zeros(3, 3);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        let (d, l) = normalized_laplacian(&w);
        assert_eq!(d[2], 0.0);
        assert_eq!(l[(2, 2)], 1.0);
        assert!(l.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn blocks_reassemble() {
        let g = build_label_graph(&["a", "b", "a", "c"]);
        assert_eq!(g.blocks().assemble(), g.laplacian);
    }
}
