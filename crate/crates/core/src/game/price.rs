use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Which price coefficient is unknown to the agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnTarget {
    /// The intercept `a`.
    A,
    /// The slope `b`.
    B,
}

impl std::str::FromStr for LearnTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(LearnTarget::A),
            "b" => Ok(LearnTarget::B),
            _ => Err(Error::InvalidParameter(format!("unknown learn target {s:?}"))),
        }
    }
}

/// Inverse demand `a − bX` or `a − bX^σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceModel {
    Linear { a: f64, b: f64 },
    Power { a: f64, b: f64, sigma: f64 },
}

impl PriceModel {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.a(), self.b());
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidModel(format!("price needs a > 0, b > 0: {self:?}")));
        }
        if let PriceModel::Power { sigma, .. } = *self {
            if !(sigma > 1.0 && sigma.is_finite()) {
                return Err(Error::InvalidModel(format!("power price needs sigma > 1, got {sigma}")));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        match *self {
            PriceModel::Linear { a, .. } | PriceModel::Power { a, .. } => a,
        }
    }

    pub fn b(&self) -> f64 {
        match *self {
            PriceModel::Linear { b, .. } | PriceModel::Power { b, .. } => b,
        }
    }

    /// Exponent; 1 for the linear model.
    pub fn sigma(&self) -> f64 {
        match *self {
            PriceModel::Linear { .. } => 1.0,
            PriceModel::Power { sigma, .. } => sigma,
        }
    }

    pub fn param(&self, target: LearnTarget) -> f64 {
        match target {
            LearnTarget::A => self.a(),
            LearnTarget::B => self.b(),
        }
    }

    /// Copy with the `target` coefficient replaced by `value`.
    pub fn with_param(&self, target: LearnTarget, value: f64) -> PriceModel {
        let mut p = *self;
        match (&mut p, target) {
            (PriceModel::Linear { a, .. } | PriceModel::Power { a, .. }, LearnTarget::A) => *a = value,
            (PriceModel::Linear { b, .. } | PriceModel::Power { b, .. }, LearnTarget::B) => *b = value,
        }
        p
    }

    /// `X` or `X^σ`.
    pub fn volume_term(&self, x: f64) -> f64 {
        match *self {
            PriceModel::Linear { .. } => x,
            PriceModel::Power { sigma, .. } => x.powf(sigma),
        }
    }

    pub fn price(&self, x: f64) -> f64 {
        self.a() - self.b() * self.volume_term(x)
    }

    /// `dp/dX`.
    pub fn slope(&self, x: f64) -> f64 {
        match *self {
            PriceModel::Linear { b, .. } => -b,
            PriceModel::Power { b, sigma, .. } => -sigma * b * x.powf(sigma - 1.0),
        }
    }

    /// `d²p/dX²`.
    pub fn curvature(&self, x: f64) -> f64 {
        match *self {
            PriceModel::Linear { .. } => 0.0,
            PriceModel::Power { b, sigma, .. } => -sigma * (sigma - 1.0) * b * x.powf(sigma - 2.0),
        }
    }
}

/// Deterministic price, with the learned coefficient optionally overridden.
pub fn eval_price(price: &PriceModel, aggregate: f64, theta_override: Option<(LearnTarget, f64)>) -> f64 {
    match theta_override {
        Some((t, v)) => price.with_param(t, v).price(aggregate),
        None => price.price(aggregate),
    }
}

/// Where the shock enters the price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `(a + ξ) − b X^σ`.
    Additive,
    /// `a − (b + ξ) X^σ`.
    Multiplicative,
}

impl NoiseKind {
    /// The coefficient the shock perturbs.
    pub fn target(self) -> LearnTarget {
        match self {
            NoiseKind::Additive => LearnTarget::A,
            NoiseKind::Multiplicative => LearnTarget::B,
        }
    }

    pub fn for_target(t: LearnTarget) -> Self {
        match t {
            LearnTarget::A => NoiseKind::Additive,
            LearnTarget::B => NoiseKind::Multiplicative,
        }
    }
}

/// I.i.d. uniform price shocks `ξ ~ U[−w, w]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub half_width: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, half_width: f64, seed: u64) -> Result<Self> {
        if !(half_width >= 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidModel(format!("noise half width {half_width} invalid")));
        }
        Ok(Self { kind, half_width, seed })
    }

    pub fn none(kind: NoiseKind) -> Self {
        Self { kind, half_width: 0.0, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks that `θ* + ξ` stays strictly inside `(δ, Δ)`.
    pub fn validate_against(&self, theta_star: f64, lower: f64, upper: f64) -> Result<()> {
        let room = (theta_star - lower).min(upper - theta_star);
        if self.half_width < room {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "noise half width {} must be below min(θ*−δ, Δ−θ*) = {room}",
                self.half_width
            )))
        }
    }

    pub fn draw_from(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.half_width == 0.0 {
            0.0
        } else {
            rng.gen_range(-self.half_width..=self.half_width)
        }
    }

    /// Shock `ξ^k` from the nature stream of this model's seed.
    pub fn draw(&self, step: u64) -> f64 {
        if self.half_width == 0.0 {
            return 0.0;
        }
        self.draw_from(&mut stream_rng(self.seed, Stream::Nature, 0, step))
    }

    /// Price with a given shock.
    pub fn apply(&self, price: &PriceModel, aggregate: f64, xi: f64) -> f64 {
        let v = price.volume_term(aggregate);
        match self.kind {
            NoiseKind::Additive => (price.a() + xi) - price.b() * v,
            NoiseKind::Multiplicative => price.a() - (price.b() + xi) * v,
        }
    }
}

/// Observed price at step `step_index`.
pub fn sample_noisy_price(price: &PriceModel, noise: &NoiseModel, aggregate: f64, step_index: u64) -> f64 {
    noise.apply(price, aggregate, noise.draw(step_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn price_examples() {
        let lin = PriceModel::Linear { a: 100.0, b: 2.0 };
        assert_eq!(eval_price(&lin, 10.0, None), 80.0);
        assert_eq!(eval_price(&lin, 0.0, None), 100.0);
        let pw = PriceModel::Power { a: 100.0, b: 2.0, sigma: 2.0 };
        assert_eq!(eval_price(&pw, 3.0, None), 82.0);
        assert_eq!(eval_price(&lin, 10.0, Some((LearnTarget::B, 3.0))), 70.0);
    }

    #[test]
    fn noise_examples() {
        let lin = PriceModel::Linear { a: 100.0, b: 2.0 };
        for kind in [NoiseKind::Additive, NoiseKind::Multiplicative] {
            let n = NoiseModel::none(kind);
            for k in 0..20 {
                assert_eq!(sample_noisy_price(&lin, &n, 7.5, k), eval_price(&lin, 7.5, None));
            }
        }
        let add = NoiseModel::new(NoiseKind::Additive, 10.0, 1).unwrap();
        assert_eq!(add.apply(&lin, 10.0, 5.0), 85.0);
    }

    #[test]
    fn draws_are_reproducible_and_bounded() {
        let n = NoiseModel::new(NoiseKind::Multiplicative, 0.5, 42).unwrap();
        for k in 0..1000 {
            let a = n.draw(k);
            assert_eq!(a, n.draw(k));
            assert!(a.abs() <= 0.5);
        }
    }

    #[test]
    fn validity() {
        assert!(PriceModel::Power { a: 1.0, b: 1.0, sigma: 1.0 }.validate().is_err());
        assert!(PriceModel::Linear { a: -1.0, b: 1.0 }.validate().is_err());
        let n = NoiseModel::new(NoiseKind::Additive, 50.0, 0).unwrap();
        assert!(n.validate_against(100.0, 49.0, 200.0).is_ok());
        assert!(n.validate_against(100.0, 51.0, 200.0).is_err());
    }
}
