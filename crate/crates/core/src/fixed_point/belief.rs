use crate::error::{Error, Result};
use crate::game::{LearnTarget, PriceModel, SingleMarketCournotSpec};

/// Smallest aggregate estimate accepted when dividing by it.
pub const MIN_AGGREGATE: f64 = 1e-9;

/// One agent's view of the market.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    /// Estimates `x_i1..x_iN` of every firm's output.
    pub x: Vec<f64>,
    /// Latest subproblem estimate of the unknown coefficient.
    pub theta: f64,
    /// Blended estimate used in the next subproblem.
    pub theta_hat: f64,
    /// Running mean of the price signals seen so far.
    pub vartheta_bar: f64,
    pub samples_seen: usize,
}

impl Belief {
    /// Common starting belief: lower bounds for outputs, box midpoint for the coefficient.
    pub fn initial(spec: &SingleMarketCournotSpec) -> Self {
        let theta = spec.theta_box.midpoint()[0];
        Self { x: spec.lower.clone(), theta, theta_hat: theta, vartheta_bar: 0.0, samples_seen: 0 }
    }

    /// `X_i`, the agent's estimate of total output.
    pub fn aggregate(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// Regularisation weights `ε^k = ε⁰/(k+1)^ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSchedule {
    pub eps0: f64,
    pub rho: f64,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        Self { eps0: 1.0, rho: 0.5 }
    }
}

impl EpsSchedule {
    pub fn new(eps0: f64, rho: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps0 must be positive, got {eps0}")));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (0, 1], got {rho}")));
        }
        Ok(Self { eps0, rho })
    }

    pub fn eps(&self, k: usize) -> f64 {
        self.eps0 / ((k + 1) as f64).powf(self.rho)
    }
}

/// Published price at step `k`. The realised total output stays with the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceObservation {
    pub value: f64,
    pub k: usize,
    true_aggregate: f64,
}

impl PriceObservation {
    pub fn new(value: f64, k: usize, true_aggregate: f64) -> Self {
        Self { value, k, true_aggregate }
    }

    /// Ground truth for diagnostics; agents never read it.
    pub fn true_aggregate(&self) -> f64 {
        self.true_aggregate
    }
}

/// Signal `ϑ` an agent extracts from the price using its own aggregate
/// estimate and the known coefficient of `price`.
///
/// Learning `a`: `p + b X_i^σ`. Learning `b`: `(a − p)/X_i^σ`.
pub fn compute_vartheta(
    observation: &PriceObservation,
    belief: &Belief,
    case: LearnTarget,
    price: &PriceModel,
) -> Result<f64> {
    let agg = belief.aggregate();
    match case {
        LearnTarget::A => Ok(observation.value + price.b() * price.volume_term(agg)),
        LearnTarget::B => {
            if !(agg >= MIN_AGGREGATE) {
                return Err(Error::Invariant(format!(
                    "aggregate estimate {agg} too small to extract the slope at step {}",
                    observation.k
                )));
            }
            Ok((price.a() - observation.value) / price.volume_term(agg))
        }
    }
}

/// Folds one more signal into the running mean.
pub fn update_running_mean(belief: &mut Belief, vartheta: f64) {
    belief.samples_seen += 1;
    let k = belief.samples_seen as f64;
    belief.vartheta_bar = ((k - 1.0) * belief.vartheta_bar + vartheta) / k;
}

/// `θ̂ = θ/(k+1) + k ϑ̄/(k+1)`.
pub fn blend_theta_hat(theta_next: f64, vartheta_bar: f64, k: usize) -> f64 {
    let w = 1.0 / (k + 1) as f64;
    w * theta_next + (1.0 - w) * vartheta_bar
}
