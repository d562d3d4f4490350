use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::network::CournotNetworkSpec;
use super::price::{NoiseModel, PriceModel};
use super::theta::ThetaBox;
use super::traits::LearningObjective;
use crate::error::{check_dim, Error, Result};
use crate::vi::ConvexSet;

/// Regression data source of one node: `S ~ U[0, s_max]` and the noisy price
/// observed at `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningNode {
    pub a_true: f64,
    pub b_true: f64,
    pub noise: NoiseModel,
    pub s_max: f64,
}

impl LearningNode {
    /// One `(S, p)` pair.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let s = if self.s_max > 0.0 { rng.gen_range(0.0..=self.s_max) } else { 0.0 };
        let xi = self.noise.draw_from(rng);
        let price = PriceModel::Linear { a: self.a_true, b: self.b_true };
        (s, self.noise.apply(&price, s, xi))
    }

    fn moments(&self) -> (f64, f64) {
        (self.s_max / 2.0, self.s_max * self.s_max / 3.0)
    }
}

/// Per-node regularised least squares
/// `min E[(a − bS − p)² + λa² + λb²]`, summed over nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningProblem {
    pub nodes: Vec<LearningNode>,
    pub lambda: f64,
    pub theta_box: ThetaBox,
    /// Scale the `b` step by `1/s_max²` so both coordinates see comparable curvature.
    pub preconditioned: bool,
}

/// Learning problem for every node of `network`, sampling `S ~ U[0, a⁰/b⁰]`.
/// `initial` holds `(a⁰, b⁰)` per node.
pub fn build_learning_problem(
    network: &CournotNetworkSpec,
    lambda: f64,
    initial: &[(f64, f64)],
) -> Result<LearningProblem> {
    check_dim(network.n_nodes, initial.len())?;
    let nodes = network
        .nodes
        .iter()
        .zip(&network.noise)
        .zip(initial)
        .map(|((m, noise), (a0, b0))| {
            if !(*a0 > 0.0 && *b0 > 0.0) {
                return Err(Error::InvalidParameter("initial estimates must be positive".into()));
            }
            Ok(LearningNode { a_true: m.a, b_true: m.b, noise: *noise, s_max: a0 / b0 })
        })
        .collect::<Result<Vec<_>>>()?;
    LearningProblem::new(nodes, lambda, network.theta_box.clone())
}

impl LearningProblem {
    pub fn new(nodes: Vec<LearningNode>, lambda: f64, theta_box: ThetaBox) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularisation must be positive for strong convexity, got {lambda}"
            )));
        }
        check_dim(2 * nodes.len(), theta_box.dim())?;
        Ok(Self { nodes, lambda, theta_box, preconditioned: true })
    }

    /// Exact `(a, b)` Hessian of node `i` divided by two.
    fn half_hessian(&self, i: usize) -> [[f64; 2]; 2] {
        let (m1, m2) = self.nodes[i].moments();
        [[1.0 + self.lambda, -m1], [-m1, m2 + self.lambda]]
    }

    /// Unconstrained minimiser per node, interleaved.
    pub fn unconstrained_minimizer(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let h = self.half_hessian(i);
            let (m1, m2) = n.moments();
            let r0 = n.a_true - n.b_true * m1;
            let r1 = -n.a_true * m1 + n.b_true * m2;
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            out.push((r0 * h[1][1] - h[0][1] * r1) / det);
            out.push((h[0][0] * r1 - h[1][0] * r0) / det);
        }
        out
    }
}

impl LearningObjective for LearningProblem {
    fn dim(&self) -> usize {
        2 * self.nodes.len()
    }

    fn theta_box(&self) -> &ThetaBox {
        &self.theta_box
    }

    fn gradient(&self, theta: &[f64], out: &mut [f64]) {
        for (i, n) in self.nodes.iter().enumerate() {
            let (a, b) = (theta[2 * i], theta[2 * i + 1]);
            let (m1, m2) = n.moments();
            let (da, db) = (a - n.a_true, b - n.b_true);
            out[2 * i] = 2.0 * (da - db * m1) + 2.0 * self.lambda * a;
            out[2 * i + 1] = -2.0 * (da * m1 - db * m2) + 2.0 * self.lambda * b;
        }
    }

    fn sampled_gradient(&self, theta: &[f64], rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for (i, n) in self.nodes.iter().enumerate() {
            let (a, b) = (theta[2 * i], theta[2 * i + 1]);
            let (s, p) = n.sample(rng);
            let r = a - b * s - p;
            out[2 * i] = 2.0 * r + 2.0 * self.lambda * a;
            out[2 * i + 1] = -2.0 * s * r + 2.0 * self.lambda * b;
        }
    }

    fn strong_convexity(&self) -> f64 {
        (0..self.nodes.len())
            .map(|i| {
                let h = self.half_hessian(i);
                let tr = h[0][0] + h[1][1];
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                // Smallest eigenvalue of the 2×2 block, doubled.
                2.0 * det / (0.5 * tr + (0.25 * tr * tr - det).max(0.0).sqrt())
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn gain(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .flat_map(|n| {
                let g = if self.preconditioned && n.s_max > 0.0 { 1.0 / (n.s_max * n.s_max) } else { 1.0 };
                [1.0, g]
            })
            .collect()
    }

    fn minimizer(&self) -> Vec<f64> {
        let m = self.unconstrained_minimizer();
        m.iter().enumerate().map(|(j, v)| self.theta_box.project_scalar(j, *v)).collect()
    }
}

/// `g(θ) = ½ μ ‖θ − c‖²` with uniform gradient noise `U[−h, h]` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    pub center: Vec<f64>,
    pub mu: f64,
    pub noise_half_width: f64,
    pub theta_box: ThetaBox,
}

impl QuadraticObjective {
    pub fn new(center: Vec<f64>, mu: f64, noise_half_width: f64, theta_box: ThetaBox) -> Result<Self> {
        check_dim(theta_box.dim(), center.len())?;
        if !(mu > 0.0) || !(noise_half_width >= 0.0) {
            return Err(Error::InvalidParameter("need mu > 0 and a nonnegative noise width".into()));
        }
        Ok(Self { center, mu, noise_half_width, theta_box })
    }
}

impl LearningObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn theta_box(&self) -> &ThetaBox {
        &self.theta_box
    }

    fn gradient(&self, theta: &[f64], out: &mut [f64]) {
        for j in 0..theta.len() {
            out[j] = self.mu * (theta[j] - self.center[j]);
        }
    }

    fn sampled_gradient(&self, theta: &[f64], rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.gradient(theta, out);
        if self.noise_half_width > 0.0 {
            for o in out.iter_mut() {
                *o += rng.gen_range(-self.noise_half_width..=self.noise_half_width);
            }
        }
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn noise_second_moment(&self) -> f64 {
        self.dim() as f64 * self.noise_half_width * self.noise_half_width / 3.0
    }

    fn minimizer(&self) -> Vec<f64> {
        self.theta_box.project(&self.center)
    }
}
