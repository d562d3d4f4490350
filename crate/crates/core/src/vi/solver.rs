use super::contraction::ContractionParams;
use super::monotone::estimate_monotonicity;
use super::sets::ConvexSet;
use crate::error::{check_dim, Error, Result};
use crate::linalg::dist;

/// Outcome of a projection-type solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖z − Π(z − γF(z))‖` at the returned point and the final step `γ`.
    pub residual: f64,
    pub gamma: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations without a new best residual before the step is halved.
    pub stall_window: usize,
    /// Sample pairs used to estimate `μ` and `L` for the first step.
    pub estimate_samples: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, stall_window: 100, estimate_samples: 64, seed: 0 }
    }
}

/// `‖x − Π(x − γF(x))‖`.
pub fn natural_residual<F>(f: &F, set: &dyn ConvexSet, x: &[f64], gamma: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let fx = f(x);
    let y: Vec<f64> = x.iter().zip(&fx).map(|(a, b)| a - gamma * b).collect();
    dist(x, &set.project(&y))
}

/// Plain iteration `z ← Π(z − γF(z))` from `Π(x0)` with a fixed step.
pub fn projection_iteration<F>(
    f: &F,
    set: &dyn ConvexSet,
    x0: &[f64],
    gamma: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    check_dim(set.dim(), x0.len())?;
    let n = set.dim();
    let mut z = set.project(x0);
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..=cfg.max_iter {
        let fz = f(&z);
        check_dim(n, fz.len())?;
        for i in 0..n {
            y[i] = z[i] - gamma * fz[i];
        }
        set.project_into(&y, &mut next);
        residual = dist(&z, &next);
        if !residual.is_finite() {
            return Err(Error::SolverFailure {
                context: "projection iteration diverged".into(),
                iterations: it,
                residual,
            });
        }
        if residual <= cfg.tol || it == cfg.max_iter {
            return Ok(SolveReport { solution: z, iterations: it, residual, gamma, converged: residual <= cfg.tol });
        }
        std::mem::swap(&mut z, &mut next);
    }
    unreachable!("loop returns on its last iteration (residual {residual})")
}

/// Projection iteration with the step of `params`.
pub fn solve_vi_projection<F>(
    f: &F,
    set: &dyn ConvexSet,
    x0: &[f64],
    params: &ContractionParams,
    cfg: &SolverConfig,
) -> Result<SolveReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    projection_iteration(f, set, x0, params.gamma, cfg)
}

/// Solves VI(K, F + εI) by projection with an adaptive step.
///
/// The first step is `(μ̂+ε)/(L̂+ε)²` from sampled constants. Whenever the
/// residual has not improved for `stall_window` iterations the step is halved
/// and the iteration restarts from the best point seen.
pub fn solve_regularized_vi<F>(
    f: &F,
    set: &dyn ConvexSet,
    eps: f64,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    check_dim(set.dim(), x0.len())?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("regularisation {eps} < 0")));
    }
    let g = |z: &[f64]| -> Vec<f64> {
        let mut v = f(z);
        for (vi, zi) in v.iter_mut().zip(z) {
            *vi += eps * zi;
        }
        v
    };
    let (mu, lip) = match estimate_monotonicity(f, set, cfg.estimate_samples.max(2), cfg.seed) {
        Ok(c) => c,
        Err(Error::DegenerateSet(_)) => {
            let z = set.project(x0);
            let residual = natural_residual(&g, set, &z, 1.0);
            return Ok(SolveReport {
                converged: residual <= cfg.tol,
                solution: z,
                iterations: 0,
                residual,
                gamma: 1.0,
            });
        }
        Err(e) => return Err(e),
    };
    let l = (lip + eps).max(f64::MIN_POSITIVE);
    let m = mu + eps;
    let gamma0 = if m > 0.0 { m / (l * l) } else { 1.0 / (l * l) };
    let min_gamma = gamma0 * 2f64.powi(-40);

    let n = set.dim();
    let mut gamma = gamma0;
    let mut z = set.project(x0);
    let mut best = z.clone();
    let mut best_res = f64::INFINITY;
    let mut since_best = 0usize;
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..=cfg.max_iter {
        let gz = g(&z);
        for i in 0..n {
            y[i] = z[i] - gamma * gz[i];
        }
        set.project_into(&y, &mut next);
        residual = dist(&z, &next);
        if residual <= cfg.tol {
            return Ok(SolveReport { solution: z, iterations: it, residual, gamma, converged: true });
        }
        if residual < best_res {
            best_res = residual;
            best.copy_from_slice(&z);
            since_best = 0;
        } else {
            since_best += 1;
        }
        if !residual.is_finite() || since_best >= cfg.stall_window {
            gamma *= 0.5;
            if gamma < min_gamma {
                break;
            }
            z.copy_from_slice(&best);
            best_res = f64::INFINITY;
            since_best = 0;
            continue;
        }
        std::mem::swap(&mut z, &mut next);
    }
    let residual_best = natural_residual(&g, set, &best, gamma);
    let (solution, residual) =
        if residual_best < residual || !residual.is_finite() { (best, residual_best) } else { (z, residual) };
    Ok(SolveReport { solution, iterations: cfg.max_iter, residual, gamma, converged: false })
}
