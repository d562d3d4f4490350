use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cost::CostModel;
use super::price::{LearnTarget, PriceModel};
use super::theta::ThetaBox;
use crate::error::{check_dim, Error, Result};
use crate::roots::brent;
use crate::vi::BoxSet;

/// `N < (3σ−1)/(σ−1)`: the firm-count bound under which the power-price map
/// stays monotone.
pub fn power_admissible(n_firms: usize, sigma: f64) -> bool {
    sigma > 1.0 && (n_firms as f64) < (3.0 * sigma - 1.0) / (sigma - 1.0)
}

/// Single-market Cournot game with interval strategy sets `[l_i, u_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleMarketCournotSpec {
    pub costs: Vec<CostModel>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub price: PriceModel,
    /// One-dimensional box for the learned coefficient.
    pub theta_box: ThetaBox,
    pub learn_target: LearnTarget,
}

impl SingleMarketCournotSpec {
    pub fn new(
        costs: Vec<CostModel>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        price: PriceModel,
        theta_box: ThetaBox,
        learn_target: LearnTarget,
    ) -> Result<Self> {
        let s = Self { costs, lower, upper, price, theta_box, learn_target };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.costs.len();
        if n == 0 {
            return Err(Error::InvalidModel("no firms".into()));
        }
        check_dim(n, self.lower.len())?;
        check_dim(n, self.upper.len())?;
        for c in &self.costs {
            c.validate()?;
        }
        for i in 0..n {
            let (l, u) = (self.lower[i], self.upper[i]);
            if !(l >= 0.0 && l < u && u.is_finite()) {
                return Err(Error::InvalidModel(format!("firm {i}: need 0 <= l < u < inf, got [{l}, {u}]")));
            }
        }
        if !self.lower.iter().any(|l| *l > 0.0) {
            return Err(Error::InvalidModel("at least one firm needs a positive lower bound".into()));
        }
        self.price.validate()?;
        self.theta_box.validate()?;
        check_dim(1, self.theta_box.dim())?;
        if let PriceModel::Power { sigma, .. } = self.price {
            if self.learn_target == LearnTarget::B {
                return Err(Error::InvalidModel("power price supports learning the intercept only".into()));
            }
            if !power_admissible(n, sigma) {
                return Err(Error::InvalidModel(format!(
                    "power price with sigma={sigma} needs N < {}, got {n}",
                    (3.0 * sigma - 1.0) / (sigma - 1.0)
                )));
            }
        }
        Ok(())
    }

    pub fn n_firms(&self) -> usize {
        self.costs.len()
    }

    pub fn theta_star(&self) -> f64 {
        self.price.param(self.learn_target)
    }

    /// Price model with the learned coefficient set to `theta`.
    pub fn price_at(&self, theta: f64) -> PriceModel {
        self.price.with_param(self.learn_target, theta)
    }

    pub fn strategy_set(&self) -> BoxSet {
        BoxSet { lower: self.lower.clone(), upper: self.upper.clone() }
    }

    pub fn max_cost_curvature(&self) -> f64 {
        self.costs.iter().map(|c| c.lipschitz()).fold(0.0, f64::max)
    }

    /// `F_i = c_i'(x_i) − p(X) − p'(X) x_i` with the learned coefficient `theta`.
    pub fn eval_map(&self, x: &[f64], theta: f64) -> Result<Vec<f64>> {
        check_dim(self.n_firms(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.map_into(&self.price_at(theta), x, &mut out);
        Ok(out)
    }

    pub(crate) fn map_into(&self, price: &PriceModel, x: &[f64], out: &mut [f64]) {
        let agg: f64 = x.iter().sum();
        let (p, dp) = (price.price(agg), price.slope(agg));
        for i in 0..x.len() {
            out[i] = self.costs[i].derivative(x[i]) - p - dp * x[i];
        }
    }

    /// `∂F/∂x` with the learned coefficient `theta`.
    pub fn jacobian(&self, x: &[f64], theta: f64) -> Result<DMatrix<f64>> {
        check_dim(self.n_firms(), x.len())?;
        let price = self.price_at(theta);
        let agg: f64 = x.iter().sum();
        let (dp, ddp) = (price.slope(agg), price.curvature(agg));
        let n = x.len();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { self.costs[i].second_derivative() - dp } else { 0.0 };
            diag - dp - ddp * x[i]
        }))
    }

    /// `∂F/∂θ` for the learned coefficient, a column of length `N`.
    pub fn theta_derivative(&self, x: &[f64]) -> Vec<f64> {
        let agg: f64 = x.iter().sum();
        let sigma = self.price.sigma();
        match self.learn_target {
            LearnTarget::A => vec![-1.0; x.len()],
            LearnTarget::B => {
                let v = self.price.volume_term(agg);
                let dv = if agg > 0.0 { sigma * agg.powf(sigma - 1.0) } else { 0.0 };
                x.iter().map(|xi| v + dv * xi).collect()
            }
        }
    }

    /// Strong-monotonicity modulus of the linear-price map (`b`).
    pub fn strong_monotonicity(&self, theta: f64) -> f64 {
        self.price_at(theta).b()
    }

    /// Lipschitz constant `M + b + b‖eeᵀ‖ = M + b(N+1)` of the linear-price map.
    pub fn lipschitz(&self, theta: f64) -> f64 {
        let b = self.price_at(theta).b();
        self.max_cost_curvature() + b + b * self.n_firms() as f64
    }

    /// Solves VI(K, F(·; price) + εI) through the aggregate.
    ///
    /// Each firm's reply to a conjectured total `X` is
    /// `clamp((p(X) − c_i)/(2d_i + ε − p'(X)), l_i, u_i)`, nonincreasing in `X`,
    /// so `Σ x_i(X) = X` has a unique root on `[Σl, Σu]`.
    pub fn aggregate_response(&self, price: &PriceModel, eps: f64) -> (Vec<f64>, f64) {
        let n = self.n_firms();
        let reply = |agg: f64, i: usize| -> f64 {
            let p = price.price(agg);
            let denom = self.costs[i].second_derivative() + eps - price.slope(agg);
            let c = self.costs[i].linear_coefficient();
            if denom > 0.0 {
                ((p - c) / denom).clamp(self.lower[i], self.upper[i])
            } else if p - c > 0.0 {
                self.upper[i]
            } else {
                self.lower[i]
            }
        };
        let excess = |agg: f64| (0..n).map(|i| reply(agg, i)).sum::<f64>() - agg;
        let lo: f64 = self.lower.iter().sum();
        let hi: f64 = self.upper.iter().sum();
        let (flo, fhi) = (excess(lo), excess(hi));
        let agg = if flo <= 0.0 {
            lo
        } else if fhi >= 0.0 {
            hi
        } else {
            brent(excess, lo, hi, flo, fhi)
        };
        let x: Vec<f64> = (0..n).map(|i| reply(agg, i)).collect();
        let total = x.iter().sum();
        (x, total)
    }

    /// Equilibrium at the learned coefficient `theta` (ε = 0).
    pub fn equilibrium(&self, theta: f64) -> Vec<f64> {
        self.aggregate_response(&self.price_at(theta), 0.0).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vi::{natural_residual, ConvexSet};

    fn duopoly(c: [f64; 2]) -> SingleMarketCournotSpec {
        SingleMarketCournotSpec::new(
            c.iter().map(|&c| CostModel::Linear { c }).collect(),
            vec![0.1, 0.0],
            vec![2.0, 2.0],
            PriceModel::Linear { a: 3.0, b: 1.0 },
            ThetaBox::scalar(1.0, 5.0).unwrap(),
            LearnTarget::A,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_foc_vanishes() {
        let s = duopoly([0.0, 0.0]);
        let f = s.eval_map(&[1.0, 1.0], 3.0).unwrap();
        assert_eq!(f, vec![0.0, 0.0]);
        assert!(s.eval_map(&[1.0], 3.0).is_err());
    }

    #[test]
    fn monopoly_gradient_at_origin() {
        let s = SingleMarketCournotSpec::new(
            vec![CostModel::Linear { c: 4.0 }],
            vec![0.5],
            vec![9.0],
            PriceModel::Linear { a: 10.0, b: 2.0 },
            ThetaBox::scalar(1.0, 20.0).unwrap(),
            LearnTarget::A,
        )
        .unwrap();
        let mut out = vec![0.0];
        s.map_into(&s.price, &[0.0], &mut out);
        assert_eq!(out, vec![4.0 - 10.0]);
    }

    #[test]
    fn linear_jacobian() {
        let s = duopoly([0.0, 0.0]);
        let j = s.jacobian(&[0.3, 1.7], 3.0).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
    }

    #[test]
    fn power_jacobian_scalar() {
        let s = SingleMarketCournotSpec::new(
            vec![CostModel::Linear { c: 0.0 }],
            vec![0.5],
            vec![3.0],
            PriceModel::Power { a: 10.0, b: 1.0, sigma: 2.0 },
            ThetaBox::scalar(1.0, 20.0).unwrap(),
            LearnTarget::A,
        )
        .unwrap();
        let j = s.jacobian(&[1.0], 10.0).unwrap();
        assert!((j[(0, 0)] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn admissibility_bounds() {
        assert!(power_admissible(22, 1.1) && !power_admissible(23, 1.1));
        assert!(power_admissible(4, 2.0) && !power_admissible(5, 2.0));
    }

    #[test]
    fn closed_form_duopoly() {
        // Interior duopoly: x_i = (a − 2c_i + c_j)/(3b).
        let s = duopoly([0.3, 0.0]);
        let x = s.equilibrium(3.0);
        assert!((x[0] - 0.8).abs() < 1e-13 && (x[1] - 1.1).abs() < 1e-13, "{x:?}");
        let f = |z: &[f64]| s.eval_map(z, 3.0).unwrap();
        assert!(natural_residual(&f, &s.strategy_set(), &x, 1.0) < 1e-13);
        assert!(s.strategy_set().contains(&x, 0.0));
    }
}
