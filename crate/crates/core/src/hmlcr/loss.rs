//! Objective terms and their gradients.
//!
//! With `A = XᵀU` and `B = YᵀV` (both m × k):
//!
//! * pull     `½‖A − B‖²`
//! * graph    `½ tr(O L̄ Oᵀ)` with `O = [Aᵀ, Bᵀ]`, expanded over the four
//!   Laplacian blocks
//! * content  `½‖UVᵀ − R‖²`
//! * scale    `½‖U‖² + ½‖V‖²`
//!
//! and the total is `λ1·pull + λ2·graph + λ3·content + scale`.

use nalgebra::DMatrix;

use super::{Hyperparams, Problem};
use crate::vectorize::LaplacianBlocks;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub pull: f64,
    pub graph: f64,
    pub content: f64,
    pub scale: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn is_finite(&self) -> bool {
        [self.pull, self.graph, self.content, self.scale, self.total]
            .iter()
            .all(|v| v.is_finite())
    }
}

fn trace_of_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // tr(aᵀ b) without forming the product
    a.dot(b)
}

pub fn pull_loss(u: &DMatrix<f64>, v: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let diff = x.tr_mul(u) - y.tr_mul(v);
    0.5 * diff.norm_squared()
}

fn graph_from_projections(a: &DMatrix<f64>, b: &DMatrix<f64>, l: &LaplacianBlocks) -> f64 {
    0.5 * (trace_of_product(a, &(&l.xx * a))
        + trace_of_product(a, &(&l.xy * b))
        + trace_of_product(b, &(&l.yx * a))
        + trace_of_product(b, &(&l.yy * b)))
}

/// Joint graph term via the four-block expansion.
pub fn graph_reg(u: &DMatrix<f64>, v: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>, l: &LaplacianBlocks) -> f64 {
    graph_from_projections(&x.tr_mul(u), &y.tr_mul(v), l)
}

/// Joint graph term from the assembled Laplacian: `½ tr(O L̄ Oᵀ)`.
pub fn graph_reg_direct(
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    laplacian: &DMatrix<f64>,
) -> f64 {
    let k = u.ncols();
    let m = x.ncols();
    let mut o = DMatrix::zeros(k, 2 * m);
    o.view_mut((0, 0), (k, m)).copy_from(&u.tr_mul(x));
    o.view_mut((0, m), (k, m)).copy_from(&v.tr_mul(y));
    0.5 * (&o * laplacian * o.transpose()).trace()
}

pub fn content_reg(u: &DMatrix<f64>, v: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    0.5 * (u * v.transpose() - r).norm_squared()
}

pub fn scale_reg(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    0.5 * u.norm_squared() + 0.5 * v.norm_squared()
}

pub fn total_loss(u: &DMatrix<f64>, v: &DMatrix<f64>, problem: &Problem, hyper: &Hyperparams) -> LossBreakdown {
    let a = problem.x.tr_mul(u);
    let b = problem.y.tr_mul(v);
    let pull = 0.5 * (&a - &b).norm_squared();
    let graph = graph_from_projections(&a, &b, &problem.laplacian);
    let content = problem.content_loss(u, v);
    let scale = scale_reg(u, v);
    LossBreakdown {
        pull,
        graph,
        content,
        scale,
        total: hyper.lambda1 * pull + hyper.lambda2 * graph + hyper.lambda3 * content + scale,
    }
}

/// `λ1·X(XᵀU − YᵀV) + λ2·(X L̄xx XᵀU + X L̄xy YᵀV) + λ3·(UVᵀ − R)V + U`
pub fn grad_u(u: &DMatrix<f64>, v: &DMatrix<f64>, problem: &Problem, hyper: &Hyperparams) -> DMatrix<f64> {
    let a = problem.x.tr_mul(u);
    let b = problem.y.tr_mul(v);
    let l = &problem.laplacian;
    let mut inner = (&a - &b) * hyper.lambda1;
    if hyper.lambda2 != 0.0 {
        inner += (&l.xx * &a + &l.xy * &b) * hyper.lambda2;
    }
    let mut g = &problem.x * inner + u;
    if hyper.lambda3 != 0.0 {
        g += problem.content_times_v(u, v) * hyper.lambda3;
    }
    g
}

/// `λ1·Y(YᵀV − XᵀU) + λ2·(Y L̄yx XᵀU + Y L̄yy YᵀV) + λ3·(UVᵀ − R)ᵀU + V`
pub fn grad_v(u: &DMatrix<f64>, v: &DMatrix<f64>, problem: &Problem, hyper: &Hyperparams) -> DMatrix<f64> {
    let a = problem.x.tr_mul(u);
    let b = problem.y.tr_mul(v);
    let l = &problem.laplacian;
    let mut inner = (&b - &a) * hyper.lambda1;
    if hyper.lambda2 != 0.0 {
        inner += (&l.yx * &a + &l.yy * &b) * hyper.lambda2;
    }
    let mut g = &problem.y * inner + v;
    if hyper.lambda3 != 0.0 {
        g += problem.content_transpose_times_u(u, v) * hyper.lambda3;
    }
    g
}
