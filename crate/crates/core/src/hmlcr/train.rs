//! Alternating gradient descent from the CFA starting point.

use nalgebra::DMatrix;

use super::cfa::cfa_init;
use super::loss::{grad_u, grad_v, total_loss, LossBreakdown};
use super::{Hyperparams, Problem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    /// d^x × k projection of word features.
    pub u: DMatrix<f64>,
    /// d^y × k projection of code features.
    pub v: DMatrix<f64>,
    pub hyper: Hyperparams,
    /// Loss at the starting point.
    pub initial: LossBreakdown,
    /// Loss after each completed iteration.
    pub trace: Vec<LossBreakdown>,
    pub converged: bool,
    /// Step size in effect at the end (differs from `hyper.eta` only with
    /// backtracking).
    pub final_eta: f64,
}

impl Model {
    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn final_loss(&self) -> LossBreakdown {
        self.trace.last().copied().unwrap_or(self.initial)
    }

    /// `U Vᵀ`, word-by-feature relatedness.
    pub fn relatedness(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose()
    }
}

/// One full update: U first, then V against the fresh U.
fn step(
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    problem: &Problem,
    hyper: &Hyperparams,
    eta: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let gu = grad_u(u, v, problem, hyper);
    let u_next = u - gu * eta;
    let gv = grad_v(&u_next, v, problem, hyper);
    let v_next = v - gv * eta;
    (u_next, v_next)
}

fn converged(prev: f64, current: f64, tol: f64) -> bool {
    (current - prev).abs() / prev.max(1.0) < tol
}

pub fn train(problem: &Problem, hyper: &Hyperparams) -> Result<Model> {
    hyper.validate_for(problem.dx(), problem.dy())?;
    let init = cfa_init(&problem.x, &problem.y, hyper.k, hyper.seed)?;
    train_from(problem, hyper, init.u, init.v)
}

/// Same trainer with the graph term switched off.
pub fn cfa_plus_cr_train(problem: &Problem, hyper: &Hyperparams) -> Result<Model> {
    train(problem, &Hyperparams { lambda2: 0.0, ..*hyper })
}

pub fn train_from(problem: &Problem, hyper: &Hyperparams, u0: DMatrix<f64>, v0: DMatrix<f64>) -> Result<Model> {
    hyper.validate()?;
    if u0.shape() != (problem.dx(), hyper.k) || v0.shape() != (problem.dy(), hyper.k) {
        return Err(Error::Dimension("starting point does not match problem and k".into()));
    }
    let (mut u, mut v) = (u0, v0);
    let initial = total_loss(&u, &v, problem, hyper);
    if !initial.is_finite() {
        return Err(Error::Diverged {
            iteration: 0,
            eta: hyper.eta,
        });
    }
    let mut eta = hyper.eta;
    let mut prev = initial.total;
    let mut trace = Vec::new();
    let mut done = false;

    for iteration in 1..=hyper.max_iter {
        let (mut nu, mut nv) = step(&u, &v, problem, hyper, eta);
        let mut loss = total_loss(&nu, &nv, problem, hyper);
        if hyper.backtracking {
            let mut halvings = 0;
            while !(loss.is_finite() && loss.total <= prev) && halvings < 50 {
                eta *= 0.5;
                halvings += 1;
                (nu, nv) = step(&u, &v, problem, hyper, eta);
                loss = total_loss(&nu, &nv, problem, hyper);
            }
        }
        if !loss.is_finite() || !nu.iter().chain(nv.iter()).all(|x| x.is_finite()) {
            return Err(Error::Diverged { iteration, eta });
        }
        u = nu;
        v = nv;
        trace.push(loss);
        if converged(prev, loss.total, hyper.tol) {
            done = true;
            break;
        }
        prev = loss.total;
    }
    log::debug!("training stopped after {} iterations, converged = {done}", trace.len());
    Ok(Model {
        u,
        v,
        hyper: *hyper,
        initial,
        trace,
        converged: done,
        final_eta: eta,
    })
}

/// Largest step among 1e-2, 5e-3, ... for which one full update from the
/// CFA starting point strictly lowers the total loss.
pub fn find_step_size(problem: &Problem, hyper: &Hyperparams) -> Result<f64> {
    hyper.validate_for(problem.dx(), problem.dy())?;
    let init = cfa_init(&problem.x, &problem.y, hyper.k, hyper.seed)?;
    let start = total_loss(&init.u, &init.v, problem, hyper).total;
    let mut eta = 1e-2;
    for _ in 0..60 {
        let (u, v) = step(&init.u, &init.v, problem, hyper, eta);
        let loss = total_loss(&u, &v, problem, hyper);
        if loss.is_finite() && loss.total < start {
            return Ok(eta);
        }
        eta *= 0.5;
    }
    Err(Error::Hyperparams(
        "no step size in the halving search decreases the loss".into(),
    ))
}
