use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cost::CostModel;
use super::market::SingleMarketCournotSpec;
use super::price::{LearnTarget, NoiseKind, NoiseModel, PriceModel};
use super::theta::ThetaBox;
use crate::error::{check_dim, Error, Result};
use crate::vi::{ConvexSet, FirmPolyhedron, ProductSet};

/// True nodal inverse demand `a − b S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeMarket {
    pub a: f64,
    pub b: f64,
}

/// Nash-Cournot game of `N` firms over `W` nodes without transport costs.
///
/// Firm `f` owns the block `(s_f1..s_fW, g_f1..g_fW)` of the joint strategy.
/// Parameter vectors are interleaved per node: `(a_1, b_1, …, a_W, b_W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotNetworkSpec {
    pub n_firms: usize,
    pub n_nodes: usize,
    /// `unit_costs[f][i]`.
    pub unit_costs: Vec<Vec<f64>>,
    /// `caps[f][i]`.
    pub caps: Vec<Vec<f64>>,
    pub nodes: Vec<NodeMarket>,
    /// Price shock model per node.
    pub noise: Vec<NoiseModel>,
    /// Box over the interleaved `(a_i, b_i)` parameters.
    pub theta_box: ThetaBox,
}

impl CournotNetworkSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, w) = (self.n_firms, self.n_nodes);
        if n == 0 || w == 0 {
            return Err(Error::InvalidModel("need at least one firm and one node".into()));
        }
        check_dim(n, self.unit_costs.len())?;
        check_dim(n, self.caps.len())?;
        check_dim(w, self.nodes.len())?;
        check_dim(w, self.noise.len())?;
        check_dim(2 * w, self.theta_box.dim())?;
        self.theta_box.validate()?;
        for f in 0..n {
            check_dim(w, self.unit_costs[f].len())?;
            check_dim(w, self.caps[f].len())?;
            for i in 0..w {
                if !(self.caps[f][i] > 0.0 && self.caps[f][i].is_finite()) {
                    return Err(Error::InvalidModel(format!("cap[{f}][{i}] must be positive")));
                }
                if !(self.unit_costs[f][i] >= 0.0 && self.unit_costs[f][i].is_finite()) {
                    return Err(Error::InvalidModel(format!("cost[{f}][{i}] must be nonnegative")));
                }
            }
        }
        for (i, m) in self.nodes.iter().enumerate() {
            if !(m.a > 0.0 && m.b > 0.0) {
                return Err(Error::InvalidModel(format!("node {i} needs a > 0, b > 0")));
            }
            let j = 2 * i + if self.noise[i].kind == NoiseKind::Additive { 0 } else { 1 };
            self.noise[i].validate_against(self.theta_star()[j], self.theta_box.lower[j], self.theta_box.upper[j])?;
        }
        Ok(())
    }

    /// `(a*_1, b*_1, …, a*_W, b*_W)`.
    pub fn theta_star(&self) -> Vec<f64> {
        self.nodes.iter().flat_map(|m| [m.a, m.b]).collect()
    }

    pub fn block_dim(&self) -> usize {
        2 * self.n_nodes
    }

    pub fn dim(&self) -> usize {
        self.n_firms * self.block_dim()
    }

    pub fn firm_set(&self, f: usize) -> Result<FirmPolyhedron> {
        FirmPolyhedron::new(self.caps[f].clone())
    }

    pub fn strategy_set(&self) -> Result<ProductSet> {
        let blocks = (0..self.n_firms)
            .map(|f| Ok(Arc::new(self.firm_set(f)?) as Arc<dyn ConvexSet>))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductSet::new(blocks))
    }

    /// Total sales `S_i` per node.
    pub fn node_sales(&self, x: &[f64]) -> Vec<f64> {
        let w = self.n_nodes;
        let mut s = vec![0.0; w];
        for f in 0..self.n_firms {
            for i in 0..w {
                s[i] += x[f * 2 * w + i];
            }
        }
        s
    }

    /// Gradient block of firm `f` at `x` under parameters `theta`.
    pub fn firm_gradient(&self, f: usize, x: &[f64], sales: &[f64], theta: &[f64], out: &mut [f64]) {
        let w = self.n_nodes;
        let base = f * 2 * w;
        for i in 0..w {
            let (a, b) = (theta[2 * i], theta[2 * i + 1]);
            out[i] = -(a - b * sales[i]) + b * x[base + i];
            out[w + i] = self.unit_costs[f][i];
        }
    }

    /// Stacked gradients with one parameter vector shared by every firm.
    pub fn eval_map(&self, x: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(2 * self.n_nodes, theta.len())?;
        let sales = self.node_sales(x);
        let bd = self.block_dim();
        let mut out = vec![0.0; x.len()];
        for f in 0..self.n_firms {
            self.firm_gradient(f, x, &sales, theta, &mut out[f * bd..(f + 1) * bd]);
        }
        Ok(out)
    }

    pub fn jacobian(&self, x: &[f64], theta: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(2 * self.n_nodes, theta.len())?;
        let (w, bd) = (self.n_nodes, self.block_dim());
        let mut j = DMatrix::zeros(self.dim(), self.dim());
        for f in 0..self.n_firms {
            for h in 0..self.n_firms {
                for i in 0..w {
                    let b = theta[2 * i + 1];
                    j[(f * bd + i, h * bd + i)] = if f == h { 2.0 * b } else { b };
                }
            }
        }
        Ok(j)
    }

    /// Lipschitz constant `max_i b_i (N+1)` of the map.
    pub fn lipschitz(&self, theta: &[f64]) -> f64 {
        (0..self.n_nodes).map(|i| theta[2 * i + 1]).fold(0.0, f64::max) * (self.n_firms as f64 + 1.0)
    }

    /// Lipschitz constant of the map in `θ` over the strategy set.
    pub fn theta_lipschitz(&self) -> f64 {
        // ∂F_{s_fi}/∂a_i = −1 and ∂F_{s_fi}/∂b_i = S_i + s_fi ≤ (N+1)·cap_max.
        let cap_tot: f64 = self.caps.iter().map(|c| c.iter().sum::<f64>()).sum();
        let per = 1.0 + 2.0 * cap_tot * cap_tot;
        (self.n_firms as f64 * per).sqrt()
    }

    /// The one-node game as a single market: `s = g = q ∈ [l, cap]`, with
    /// `lower[f]` supplied by the caller.
    pub fn to_single_market(&self, target: LearnTarget, lower: Vec<f64>) -> Result<SingleMarketCournotSpec> {
        if self.n_nodes != 1 {
            return Err(Error::InvalidModel(format!(
                "only one-node networks reduce to a single market (W = {})",
                self.n_nodes
            )));
        }
        let j = match target {
            LearnTarget::A => 0,
            LearnTarget::B => 1,
        };
        SingleMarketCournotSpec::new(
            self.unit_costs.iter().map(|c| CostModel::Linear { c: c[0] }).collect(),
            lower,
            self.caps.iter().map(|c| c[0]).collect(),
            PriceModel::Linear { a: self.nodes[0].a, b: self.nodes[0].b },
            self.theta_box.select(&[j])?,
            target,
        )
    }
}
