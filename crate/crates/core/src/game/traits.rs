use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use super::market::SingleMarketCournotSpec;
use super::network::CournotNetworkSpec;
use super::theta::ThetaBox;
use crate::error::{check_dim, Error, Result};
use crate::linalg::norm_sq;
use crate::rng::{stream_rng, Stream};
use crate::vi::{BoxSet, ConvexSet, ProductSet};

/// A game whose players each own a block of the joint strategy `x` and
/// evaluate their partial gradient under a private parameter estimate.
pub trait Game: Send + Sync {
    fn n_agents(&self) -> usize;

    /// Dimension of the joint strategy.
    fn dim(&self) -> usize;

    fn block(&self, agent: usize) -> Range<usize>;

    /// Dimension of the parameter vector an agent holds.
    fn theta_dim(&self) -> usize;

    fn agent_set(&self, agent: usize) -> Arc<dyn ConvexSet>;

    /// `∇_{x_i} f_i(x; θ_i)` written into `out` (length of the agent's block).
    fn partial_gradient(&self, agent: usize, x: &[f64], theta: &[f64], out: &mut [f64]);

    /// Stacked partial gradients with a common parameter.
    fn joint_map(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for i in 0..self.n_agents() {
            let r = self.block(i);
            self.partial_gradient(i, x, theta, &mut out[r]);
        }
        out
    }

    fn joint_set(&self) -> ProductSet {
        ProductSet::new((0..self.n_agents()).map(|i| self.agent_set(i)).collect())
    }
}

/// Strongly convex learning objective `g(θ)` with a sampled gradient oracle.
pub trait LearningObjective: Send + Sync {
    fn dim(&self) -> usize;

    fn theta_box(&self) -> &ThetaBox;

    fn gradient(&self, theta: &[f64], out: &mut [f64]);

    /// Unbiased sample of the gradient.
    fn sampled_gradient(&self, theta: &[f64], rng: &mut ChaCha8Rng, out: &mut [f64]);

    fn strong_convexity(&self) -> f64;

    /// Per-coordinate multiplier applied to learning steps.
    fn gain(&self) -> Vec<f64> {
        vec![1.0; self.dim()]
    }

    /// Upper estimate of `sup_θ E‖sampled − exact‖²` over the box, by Monte
    /// Carlo at the box corners (a random subset of them in high dimension).
    fn noise_second_moment(&self) -> f64 {
        let bx = self.theta_box();
        let m = self.dim();
        let mut rng = stream_rng(0, Stream::Sampling, 0, 0);
        let points: Vec<Vec<f64>> = if m <= 8 {
            (0..1usize << m)
                .map(|mask| (0..m).map(|j| if mask >> j & 1 == 1 { bx.upper[j] } else { bx.lower[j] }).collect())
                .collect()
        } else {
            (0..256).map(|_| bx.sample(&mut rng)).collect()
        };
        let (mut exact, mut s) = (vec![0.0; m], vec![0.0; m]);
        let mut worst: f64 = 0.0;
        for p in &points {
            self.gradient(p, &mut exact);
            let mut acc = 0.0;
            let draws = 2000;
            for _ in 0..draws {
                self.sampled_gradient(p, &mut rng, &mut s);
                acc += s.iter().zip(&exact).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            }
            worst = worst.max(acc / draws as f64);
        }
        1.1 * worst
    }

    /// Minimiser over the box.
    fn minimizer(&self) -> Vec<f64>;
}

impl Game for SingleMarketCournotSpec {
    fn n_agents(&self) -> usize {
        self.n_firms()
    }

    fn dim(&self) -> usize {
        self.n_firms()
    }

    fn block(&self, agent: usize) -> Range<usize> {
        agent..agent + 1
    }

    fn theta_dim(&self) -> usize {
        1
    }

    fn agent_set(&self, agent: usize) -> Arc<dyn ConvexSet> {
        Arc::new(BoxSet { lower: vec![self.lower[agent]], upper: vec![self.upper[agent]] })
    }

    fn partial_gradient(&self, agent: usize, x: &[f64], theta: &[f64], out: &mut [f64]) {
        let price = self.price_at(theta[0]);
        let agg: f64 = x.iter().sum();
        out[0] = self.costs[agent].derivative(x[agent]) - price.price(agg) - price.slope(agg) * x[agent];
    }
}

impl Game for CournotNetworkSpec {
    fn n_agents(&self) -> usize {
        self.n_firms
    }

    fn dim(&self) -> usize {
        CournotNetworkSpec::dim(self)
    }

    fn block(&self, agent: usize) -> Range<usize> {
        let bd = self.block_dim();
        agent * bd..(agent + 1) * bd
    }

    fn theta_dim(&self) -> usize {
        2 * self.n_nodes
    }

    fn agent_set(&self, agent: usize) -> Arc<dyn ConvexSet> {
        Arc::new(self.firm_set(agent).expect("validated capacities"))
    }

    fn partial_gradient(&self, agent: usize, x: &[f64], theta: &[f64], out: &mut [f64]) {
        let sales = self.node_sales(x);
        self.firm_gradient(agent, x, &sales, theta, out);
    }
}

/// `F(x; θ) = A x + C θ + r` over a product of boxes.
#[derive(Debug, Clone)]
pub struct AffineGame {
    pub matrix: DMatrix<f64>,
    pub coupling: DMatrix<f64>,
    pub offset: DVector<f64>,
    pub sets: Vec<BoxSet>,
    offsets: Vec<usize>,
}

impl AffineGame {
    pub fn new(matrix: DMatrix<f64>, coupling: DMatrix<f64>, offset: DVector<f64>, sets: Vec<BoxSet>) -> Result<Self> {
        let n = matrix.nrows();
        check_dim(n, matrix.ncols())?;
        check_dim(n, coupling.nrows())?;
        check_dim(n, offset.len())?;
        let mut offsets = vec![0];
        for s in &sets {
            offsets.push(offsets.last().unwrap() + s.dim());
        }
        check_dim(n, *offsets.last().unwrap())?;
        if sets.is_empty() {
            return Err(Error::InvalidModel("affine game needs at least one player".into()));
        }
        Ok(Self { matrix, coupling, offset, sets, offsets })
    }

    /// Strong-monotonicity modulus: smallest eigenvalue of the symmetric part of `A`.
    pub fn strong_monotonicity(&self) -> f64 {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }

    /// Lipschitz constant in `x`: spectral norm of `A`.
    pub fn lipschitz(&self) -> f64 {
        self.matrix.clone().svd(false, false).singular_values.max()
    }

    /// Lipschitz constant in `θ` of one player's map, maximised over players:
    /// the largest spectral norm of a row block of `C`.
    pub fn theta_lipschitz(&self) -> f64 {
        if self.coupling.ncols() == 0 {
            return 0.0;
        }
        (0..self.n_agents())
            .map(|i| {
                let r = self.block(i);
                let rows = self.coupling.rows(r.start, r.len()).clone_owned();
                rows.svd(false, false).singular_values.max()
            })
            .fold(0.0, f64::max)
    }

    /// Per-player sup of `‖F_i‖²` over the corners of `K × Θ`; exact because
    /// each block is affine and its squared norm convex.
    pub fn max_block_norm_sq(&self, theta_box: &ThetaBox) -> Vec<f64> {
        let n = self.matrix.nrows();
        let m = theta_box.dim();
        assert!(n + m <= 20, "corner enumeration limited to 20 coordinates");
        let lo: Vec<f64> = self.sets.iter().flat_map(|s| s.lower.clone()).chain(theta_box.lower.clone()).collect();
        let hi: Vec<f64> = self.sets.iter().flat_map(|s| s.upper.clone()).chain(theta_box.upper.clone()).collect();
        let mut worst = vec![0.0f64; self.n_agents()];
        for mask in 0u32..(1u32 << (n + m)) {
            let z: Vec<f64> = (0..n + m).map(|j| if mask >> j & 1 == 1 { hi[j] } else { lo[j] }).collect();
            let f = self.joint_map(&z[..n], &z[n..]);
            for (i, w) in worst.iter_mut().enumerate() {
                *w = w.max(norm_sq(&f[self.block(i)]));
            }
        }
        worst
    }
}

impl Game for AffineGame {
    fn n_agents(&self) -> usize {
        self.sets.len()
    }

    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn block(&self, agent: usize) -> Range<usize> {
        self.offsets[agent]..self.offsets[agent + 1]
    }

    fn theta_dim(&self) -> usize {
        self.coupling.ncols()
    }

    fn agent_set(&self, agent: usize) -> Arc<dyn ConvexSet> {
        Arc::new(self.sets[agent].clone())
    }

    fn partial_gradient(&self, agent: usize, x: &[f64], theta: &[f64], out: &mut [f64]) {
        for (o, r) in out.iter_mut().zip(self.block(agent)) {
            let row: f64 = x.iter().enumerate().map(|(c, v)| self.matrix[(r, c)] * v).sum();
            let cross: f64 = theta.iter().enumerate().map(|(c, t)| self.coupling[(r, c)] * t).sum();
            *o = self.offset[r] + row + cross;
        }
    }
}
