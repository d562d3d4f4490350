use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convex production cost `c x + d x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    Linear { c: f64 },
    Quadratic { c: f64, d: f64 },
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CostModel::Linear { c } if c.is_finite() => Ok(()),
            CostModel::Quadratic { c, d } if c.is_finite() && d >= 0.0 && d.is_finite() => Ok(()),
            _ => Err(Error::InvalidModel(format!("cost {self:?} is not convex and finite"))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            CostModel::Linear { c } => c * x,
            CostModel::Quadratic { c, d } => c * x + d * x * x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            CostModel::Linear { c } => c,
            CostModel::Quadratic { c, d } => c + 2.0 * d * x,
        }
    }

    pub fn second_derivative(&self) -> f64 {
        match *self {
            CostModel::Linear { .. } => 0.0,
            CostModel::Quadratic { d, .. } => 2.0 * d,
        }
    }

    /// Lipschitz constant of the derivative.
    pub fn lipschitz(&self) -> f64 {
        self.second_derivative()
    }

    pub fn linear_coefficient(&self) -> f64 {
        match *self {
            CostModel::Linear { c } | CostModel::Quadratic { c, .. } => c,
        }
    }
}
