//! Cross-modal factor analysis: orthonormal U, V minimizing `‖XᵀU − YᵀV‖`
//! from the top singular vectors of `X Yᵀ`.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CfaInit {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    /// Singular values of `X Yᵀ` backing the first `rank` columns.
    pub singular_values: Vec<f64>,
    /// Number of columns taken from the decomposition; the rest are padding.
    pub rank: usize,
}

/// Left singular vectors, singular values and right singular vectors of
/// `X Yᵀ`, sorted by decreasing singular value.
fn cross_svd(x: &DMatrix<f64>, y: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (dx, m) = x.shape();
    let dy = y.nrows();
    let (left, s, right) = if m < dx.min(dy) && m > 0 {
        // X = Qx Rx, Y = Qy Ry  =>  X Yᵀ = Qx (Rx Ryᵀ) Qyᵀ
        let qx = x.clone().qr();
        let qy = y.clone().qr();
        let core = qx.r() * qy.r().transpose();
        let svd = core.svd(true, true);
        let left = qx.q() * svd.u.unwrap();
        let right = qy.q() * svd.v_t.unwrap().transpose();
        (left, svd.singular_values, right)
    } else {
        let svd = (x * y.transpose()).svd(true, true);
        (svd.u.unwrap(), svd.singular_values, svd.v_t.unwrap().transpose())
    };
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let left = left.select_columns(&order);
    let right = right.select_columns(&order);
    let s = order.iter().map(|&i| s[i]).collect();
    (left, s, right)
}

/// Index of the entry with the largest magnitude, first one on ties.
fn argmax_abs(col: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..col.len() {
        if col[i].abs() > col[best].abs() {
            best = i;
        }
    }
    best
}

fn orient(col: &mut DVector<f64>) -> bool {
    if col.is_empty() {
        return false;
    }
    if col[argmax_abs(col)] < 0.0 {
        col.neg_mut();
        true
    } else {
        false
    }
}

/// Extends `basis` (orthonormal columns) to `k` columns with seeded random
/// directions orthogonalized against what is already there.
fn pad_orthonormal(basis: &[DVector<f64>], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let mut cols: Vec<DVector<f64>> = basis.to_vec();
    while cols.len() < k {
        let mut c = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        // two passes of Gram-Schmidt keep the result orthogonal to rounding
        for _ in 0..2 {
            for b in &cols {
                let p = b.dot(&c);
                c.axpy(-p, b, 1.0);
            }
        }
        let n = c.norm();
        if n > 1e-8 {
            c /= n;
            orient(&mut c);
            cols.push(c);
        }
    }
    cols
}

pub fn cfa_init(x: &DMatrix<f64>, y: &DMatrix<f64>, k: usize, seed: u64) -> Result<CfaInit> {
    let (dx, m) = x.shape();
    let dy = y.nrows();
    if y.ncols() != m {
        return Err(Error::Dimension(format!("X has {m} columns but Y has {}", y.ncols())));
    }
    if k == 0 || k > dx.min(dy) {
        return Err(Error::Hyperparams(format!("k = {k} must lie in 1..={}", dx.min(dy))));
    }

    let (left, s, right) = cross_svd(x, y);
    let top = s.first().copied().unwrap_or(0.0);
    let threshold = top * dx.max(dy) as f64 * f64::EPSILON;
    let rank = s.iter().take(k).filter(|&&v| v > threshold && v > 0.0).count();

    let mut us = Vec::with_capacity(k);
    let mut vs = Vec::with_capacity(k);
    for i in 0..rank {
        let mut u: DVector<f64> = left.column(i).into_owned();
        let mut v: DVector<f64> = right.column(i).into_owned();
        if orient(&mut u) {
            v.neg_mut();
        }
        us.push(u);
        vs.push(v);
    }
    if rank < k {
        log::warn!("rank of X Y^T is {rank} < k = {k}; padding with orthonormal complements");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        us = pad_orthonormal(&us, dx, k, &mut rng);
        vs = pad_orthonormal(&vs, dy, k, &mut rng);
    }
    Ok(CfaInit {
        u: DMatrix::from_columns(&us),
        v: DMatrix::from_columns(&vs),
        singular_values: s[..rank].to_vec(),
        rank,
    })
}
