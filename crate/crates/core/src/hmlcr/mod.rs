//! Projection learning: loss terms, gradients, CFA initialization and the
//! alternating gradient-descent trainer.

mod cfa;
mod io;
mod loss;
mod train;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ContentMatrix;
use crate::vectorize::{DataMatrices, LabelGraph, LaplacianBlocks};

pub use cfa::{cfa_init, CfaInit};
pub use io::{read_model, write_model, write_trace, ModelFile, MODEL_FORMAT_VERSION};
pub use loss::{
    content_reg, grad_u, grad_v, graph_reg, graph_reg_direct, pull_loss, scale_reg, total_loss, LossBreakdown,
};
pub use train::{cfa_plus_cr_train, find_step_size, train, train_from, Model};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub k: usize,
    pub eta: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Halve η whenever a full update would increase the loss.
    pub backtracking: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            lambda1: 1.0,
            lambda2: 0.1,
            lambda3: 0.2,
            k: 64,
            eta: 1e-3,
            max_iter: 500,
            tol: 1e-6,
            seed: 0,
            backtracking: false,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Hyperparams(m));
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be a finite nonnegative number, got {v}"));
            }
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta must be a finite positive number, got {}", self.eta));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return bad(format!("tol must be nonnegative, got {}", self.tol));
        }
        Ok(())
    }

    /// Checks the latent dimension against the feature dimensions.
    pub fn validate_for(&self, dx: usize, dy: usize) -> Result<()> {
        self.validate()?;
        if self.k > dx.min(dy) {
            return Err(Error::Hyperparams(format!(
                "k = {} exceeds min(d^x, d^y) = {}",
                self.k,
                dx.min(dy)
            )));
        }
        Ok(())
    }
}

/// Everything the objective depends on besides U and V.
#[derive(Debug, Clone)]
pub struct Problem {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub laplacian: LaplacianBlocks,
    pub r: DMatrix<f64>,
    /// Nonzeros of R, used when R is large and sparse.
    r_entries: Option<Vec<(usize, usize, f64)>>,
}

const DENSE_CONTENT_LIMIT: usize = 1 << 22;

impl Problem {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, laplacian: LaplacianBlocks, r: DMatrix<f64>) -> Result<Self> {
        let m = x.ncols();
        if y.ncols() != m {
            return Err(Error::Dimension(format!("X has {m} columns but Y has {}", y.ncols())));
        }
        if laplacian.documents() != m
            || [&laplacian.xy, &laplacian.yx, &laplacian.yy]
                .iter()
                .any(|b| b.shape() != (m, m))
        {
            return Err(Error::Dimension(format!("Laplacian blocks are not {m} x {m}")));
        }
        if r.shape() != (x.nrows(), y.nrows()) {
            return Err(Error::Dimension(format!(
                "R is {} x {} but expected {} x {}",
                r.nrows(),
                r.ncols(),
                x.nrows(),
                y.nrows()
            )));
        }
        let r_entries = if r.len() > DENSE_CONTENT_LIMIT {
            let mut e = Vec::new();
            for c in 0..r.ncols() {
                for row in 0..r.nrows() {
                    let v = r[(row, c)];
                    if v != 0.0 {
                        e.push((row, c, v));
                    }
                }
            }
            Some(e)
        } else {
            None
        };
        Ok(Problem {
            x,
            y,
            laplacian,
            r,
            r_entries,
        })
    }

    pub fn from_parts(data: &DataMatrices, graph: &LabelGraph, content: &ContentMatrix) -> Result<Self> {
        Self::new(data.x.clone(), data.y.clone(), graph.blocks(), content.to_dense())
    }

    pub fn dx(&self) -> usize {
        self.x.nrows()
    }

    pub fn dy(&self) -> usize {
        self.y.nrows()
    }

    pub fn documents(&self) -> usize {
        self.x.ncols()
    }

    pub(crate) fn content_loss(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        match &self.r_entries {
            None => content_reg(u, v, &self.r),
            Some(entries) => {
                // ½(‖UVᵀ‖² − 2⟨UVᵀ, R⟩ + ‖R‖²) without forming UVᵀ
                let uvn = (u.tr_mul(u)).dot(&v.tr_mul(v));
                let mut cross = 0.0;
                let mut rn = 0.0;
                for &(i, j, r) in entries {
                    cross += r * u.row(i).dot(&v.row(j));
                    rn += r * r;
                }
                (0.5 * (uvn - 2.0 * cross + rn)).max(0.0)
            }
        }
    }

    /// `(UVᵀ − R) V`
    pub(crate) fn content_times_v(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = u * v.tr_mul(v);
        match &self.r_entries {
            None => out -= &self.r * v,
            Some(entries) => {
                for &(i, j, r) in entries {
                    for c in 0..v.ncols() {
                        out[(i, c)] -= r * v[(j, c)];
                    }
                }
            }
        }
        out
    }

    /// `(UVᵀ − R)ᵀ U`
    pub(crate) fn content_transpose_times_u(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = v * u.tr_mul(u);
        match &self.r_entries {
            None => out -= self.r.tr_mul(u),
            Some(entries) => {
                for &(i, j, r) in entries {
                    for c in 0..u.ncols() {
                        out[(j, c)] -= r * u[(i, c)];
                    }
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn force_sparse(mut self) -> Self {
        let mut e = Vec::new();
        for c in 0..self.r.ncols() {
            for row in 0..self.r.nrows() {
                if self.r[(row, c)] != 0.0 {
                    e.push((row, c, self.r[(row, c)]));
                }
            }
        }
        self.r_entries = Some(e);
        self
    }
}
