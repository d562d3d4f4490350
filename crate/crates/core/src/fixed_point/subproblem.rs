use nalgebra::DMatrix;

use super::belief::{blend_theta_hat, Belief, PriceObservation};
use crate::error::{Error, Result};
use crate::game::{LearnTarget, SingleMarketCournotSpec};
use crate::roots::brent;
use crate::vi::{natural_residual, solve_regularized_vi, BoxSet, SolverConfig};

/// Agent `i`'s joint problem in `z = (x_i1..x_iN, θ_i)` at step `k`.
///
/// The map is `(F_1(x_i; θ̂), …, F_N(x_i; θ̂), p̃)` with
/// `θ̂ = θ/(k+1) + k ϑ̄/(k+1)` and `p̃ = p(X_i; θ̂) − p^k` when learning the
/// intercept (sign flipped for the slope).
#[derive(Debug, Clone, Copy)]
pub struct Subproblem<'a> {
    pub spec: &'a SingleMarketCournotSpec,
    pub k: usize,
    pub observed_price: f64,
    pub vartheta_bar: f64,
}

/// Which solver handles the subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubproblemMethod {
    /// Scalar root in `θ` around the exact aggregate reply in `x`.
    #[default]
    Reduced,
    /// Adaptive projection iteration on the full `z` map.
    Projection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub x: Vec<f64>,
    pub theta: f64,
    /// Natural-map residual (`γ = 1`) of the regularised map at the solution.
    pub residual: f64,
    pub iterations: usize,
}

impl<'a> Subproblem<'a> {
    pub fn new(spec: &'a SingleMarketCournotSpec, k: usize, observation: &PriceObservation, belief: &Belief) -> Self {
        Self { spec, k, observed_price: observation.value, vartheta_bar: belief.vartheta_bar }
    }

    pub fn dim(&self) -> usize {
        self.spec.n_firms() + 1
    }

    pub fn theta_hat(&self, theta: f64) -> f64 {
        blend_theta_hat(theta, self.vartheta_bar, self.k)
    }

    /// `K̂ = ΠK_j × Θ`.
    pub fn set(&self) -> BoxSet {
        let mut lower = self.spec.lower.clone();
        let mut upper = self.spec.upper.clone();
        lower.push(self.spec.theta_box.lower[0]);
        upper.push(self.spec.theta_box.upper[0]);
        BoxSet { lower, upper }
    }

    fn price_gap(&self, agg: f64, theta_hat: f64) -> f64 {
        let model = self.spec.price_at(theta_hat).price(agg);
        match self.spec.learn_target {
            LearnTarget::A => model - self.observed_price,
            LearnTarget::B => self.observed_price - model,
        }
    }

    /// Unregularised map at `z`.
    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        let n = self.spec.n_firms();
        let (x, theta) = (&z[..n], z[n]);
        let th = self.theta_hat(theta);
        let mut out = vec![0.0; n + 1];
        self.spec.map_into(&self.spec.price_at(th), x, &mut out[..n]);
        out[n] = self.price_gap(x.iter().sum(), th);
        out
    }

    /// Jacobian of [`Subproblem::eval`] in block form `[[A, B], [C, D]]`.
    ///
    /// `A` is the strategy Jacobian at `θ̂`, `B = ∂F/∂θ̂ /(k+1)`. Learning `a`:
    /// `C = p'(X) eᵀ`, `D = 1/(k+1)`. Learning `b`: `C = θ̂ eᵀ`, `D = X/(k+1)`.
    pub fn jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let n = self.spec.n_firms();
        let (x, theta) = (&z[..n], z[n]);
        let th = self.theta_hat(theta);
        let w = 1.0 / (self.k + 1) as f64;
        let agg: f64 = x.iter().sum();
        let a = self.spec.jacobian(x, th).expect("dimension checked by caller");
        let col = self.spec.theta_derivative(x);
        let price = self.spec.price_at(th);
        let (c, d) = match self.spec.learn_target {
            LearnTarget::A => (price.slope(agg), w),
            LearnTarget::B => (-price.slope(agg), price.volume_term(agg) * w),
        };
        let mut j = DMatrix::zeros(n + 1, n + 1);
        j.view_mut((0, 0), (n, n)).copy_from(&a);
        for r in 0..n {
            j[(r, n)] = col[r] * w;
            j[(n, r)] = c;
        }
        j[(n, n)] = d;
        j
    }

    /// Regularised map `G(z) + εz`.
    pub fn eval_regularized(&self, z: &[f64], eps: f64) -> Vec<f64> {
        let mut v = self.eval(z);
        for (vi, zi) in v.iter_mut().zip(z) {
            *vi += eps * zi;
        }
        v
    }

    pub fn residual(&self, z: &[f64], eps: f64) -> f64 {
        natural_residual(&|v: &[f64]| self.eval_regularized(v, eps), &self.set(), z, 1.0)
    }
}

/// Solves agent `i`'s regularised subproblem and certifies the result by its
/// natural-map residual. The reduced method falls back to projection when
/// its certificate misses `cfg.tol`.
pub fn solve_agent_subproblem(
    sub: &Subproblem<'_>,
    eps: f64,
    method: SubproblemMethod,
    cfg: &SolverConfig,
) -> Result<SubproblemSolution> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("subproblem needs eps > 0, got {eps}")));
    }
    if method == SubproblemMethod::Reduced {
        let sol = solve_reduced(sub, eps);
        if sol.residual <= cfg.tol {
            return Ok(sol);
        }
        let mut start = sol.x.clone();
        start.push(sol.theta);
        return solve_projection(sub, eps, &start, cfg);
    }
    let mut start = sub.spec.lower.clone();
    start.push(sub.spec.theta_box.midpoint()[0]);
    solve_projection(sub, eps, &start, cfg)
}

fn solve_reduced(sub: &Subproblem<'_>, eps: f64) -> SubproblemSolution {
    let spec = sub.spec;
    let mut evals = 0usize;
    let mut phi = |theta: f64| -> f64 {
        evals += 1;
        let th = sub.theta_hat(theta);
        let (_, agg) = spec.aggregate_response(&spec.price_at(th), eps);
        sub.price_gap(agg, th) + eps * theta
    };
    let (lo, hi) = (spec.theta_box.lower[0], spec.theta_box.upper[0]);
    let (f_lo, f_hi) = (phi(lo), phi(hi));
    let theta = if f_lo >= 0.0 {
        lo
    } else if f_hi <= 0.0 {
        hi
    } else {
        brent(&mut phi, lo, hi, f_lo, f_hi)
    };
    let (x, _) = spec.aggregate_response(&spec.price_at(sub.theta_hat(theta)), eps);
    let mut z = x.clone();
    z.push(theta);
    SubproblemSolution { residual: sub.residual(&z, eps), x, theta, iterations: evals }
}

fn solve_projection(sub: &Subproblem<'_>, eps: f64, start: &[f64], cfg: &SolverConfig) -> Result<SubproblemSolution> {
    // The solver stops on its own step's residual; tighten until the unit-step
    // certificate also holds.
    let f = |z: &[f64]| sub.eval(z);
    let set = sub.set();
    let mut local = cfg.clone();
    let mut z = start.to_vec();
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..6 {
        let report = solve_regularized_vi(&f, &set, eps, &z, &local)?;
        iterations += report.iterations;
        z = report.solution;
        residual = sub.residual(&z, eps);
        if residual <= cfg.tol {
            let n = sub.spec.n_firms();
            return Ok(SubproblemSolution { x: z[..n].to_vec(), theta: z[n], residual, iterations });
        }
        local.tol *= (0.5 * cfg.tol / residual).max(1e-4);
    }
    Err(Error::SolverFailure { context: format!("agent subproblem at step {}", sub.k), iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{CostModel, PriceModel, ThetaBox};

    fn duopoly(target: LearnTarget) -> SingleMarketCournotSpec {
        let tb = match target {
            LearnTarget::A => ThetaBox::scalar(1.0, 5.0),
            LearnTarget::B => ThetaBox::scalar(0.2, 3.0),
        };
        SingleMarketCournotSpec::new(
            vec![CostModel::Linear { c: 0.0 }; 2],
            vec![0.1, 0.1],
            vec![2.0, 2.0],
            PriceModel::Linear { a: 3.0, b: 1.0 },
            tb.unwrap(),
            target,
        )
        .unwrap()
    }

    #[test]
    fn case_a_jacobian_blocks() {
        let spec = duopoly(LearnTarget::A);
        let sub = Subproblem { spec: &spec, k: 0, observed_price: 2.0, vartheta_bar: 0.0 };
        let j = sub.jacobian(&[0.5, 0.7, 3.0]);
        let want = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, -1.0, 1.0, 2.0, -1.0, -1.0, -1.0, 1.0]);
        assert_eq!(j, want);
    }

    #[test]
    fn reduced_matches_projection() {
        for target in [LearnTarget::A, LearnTarget::B] {
            let spec = duopoly(target);
            for (k, vb) in [(0usize, 0.0), (3, spec.theta_star() * 1.1)] {
                let sub = Subproblem { spec: &spec, k, observed_price: 1.2, vartheta_bar: vb };
                let cfg = SolverConfig::default();
                let r = solve_agent_subproblem(&sub, 0.5, SubproblemMethod::Reduced, &cfg).unwrap();
                let p = solve_agent_subproblem(&sub, 0.5, SubproblemMethod::Projection, &cfg).unwrap();
                assert!(r.residual <= 1e-10 && p.residual <= 1e-10);
                for (a, b) in r.x.iter().zip(&p.x) {
                    assert!((a - b).abs() < 1e-8, "{target:?} {k}: {r:?} vs {p:?}");
                }
                assert!((r.theta - p.theta).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn large_eps_approaches_projection_of_origin() {
        let spec = duopoly(LearnTarget::A);
        let sub = Subproblem { spec: &spec, k: 0, observed_price: 2.0, vartheta_bar: 0.0 };
        let sol = solve_agent_subproblem(&sub, 1e8, SubproblemMethod::Reduced, &SolverConfig::default()).unwrap();
        assert!((sol.x[0] - 0.1).abs() < 1e-6 && (sol.x[1] - 0.1).abs() < 1e-6);
        assert!((sol.theta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_eps_refused() {
        let spec = duopoly(LearnTarget::A);
        let sub = Subproblem { spec: &spec, k: 0, observed_price: 2.0, vartheta_bar: 0.0 };
        assert!(solve_agent_subproblem(&sub, 0.0, SubproblemMethod::Reduced, &SolverConfig::default()).is_err());
    }
}
