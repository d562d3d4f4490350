use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vi::{BoxSet, ConvexSet};

/// Compact estimator set `Θ = [δ, Δ]` with `0 < δ < Δ` coordinate-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ThetaBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn scalar(lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower], vec![upper])
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.lower.len(), self.upper.len())?;
        if self.lower.is_empty() {
            return Err(Error::InvalidModel("empty parameter box".into()));
        }
        for (j, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(*l > 0.0 && l < u && u.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "parameter box coordinate {j}: need 0 < lower < upper < inf, got [{l}, {u}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn project_scalar(&self, j: usize, v: f64) -> f64 {
        v.max(self.lower[j]).min(self.upper[j])
    }

    pub fn as_box(&self) -> BoxSet {
        BoxSet { lower: self.lower.clone(), upper: self.upper.clone() }
    }

    /// Largest distance from `point` to a corner of the box, per coordinate.
    pub fn max_deviation(&self, point: &[f64]) -> Vec<f64> {
        point.iter().enumerate().map(|(j, p)| (p - self.lower[j]).abs().max((self.upper[j] - p).abs())).collect()
    }

    /// Sub-box over the listed coordinates.
    pub fn select(&self, coords: &[usize]) -> Result<ThetaBox> {
        ThetaBox::new(coords.iter().map(|&j| self.lower[j]).collect(), coords.iter().map(|&j| self.upper[j]).collect())
    }
}

impl ConvexSet for ThetaBox {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn project_into(&self, y: &[f64], out: &mut [f64]) {
        for j in 0..y.len() {
            out[j] = self.project_scalar(j, y[j]);
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.as_box().contains(x, tol)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.as_box().sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_enforced() {
        assert!(ThetaBox::scalar(0.0, 1.0).is_err());
        assert!(ThetaBox::scalar(2.0, 1.0).is_err());
        assert!(ThetaBox::new(vec![1.0], vec![2.0, 3.0]).is_err());
        let b = ThetaBox::new(vec![1.0, 0.5], vec![5.0, 0.7]).unwrap();
        assert_eq!(b.project(&[9.0, 0.1]), vec![5.0, 0.5]);
        assert_eq!(b.midpoint(), vec![3.0, 0.6]);
    }
}
