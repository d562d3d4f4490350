use crate::error::{Error, Result};

/// Strong-monotonicity modulus, Lipschitz constant and step of a projection
/// iteration `z ← Π(z − γF(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionParams {
    pub mu: f64,
    pub lipschitz: f64,
    pub gamma: f64,
}

impl ContractionParams {
    /// Accepts `mu > 0`, `L >= mu` and `0 <= gamma < 2 mu / L^2`.
    /// A zero step is allowed but gives `q = 1`.
    pub fn new(mu: f64, lipschitz: f64, gamma: f64) -> Result<Self> {
        if !(mu > 0.0) || !(lipschitz >= mu) || !lipschitz.is_finite() {
            return Err(Error::InvalidParameter(format!("need 0 < mu <= L, got mu={mu}, L={lipschitz}")));
        }
        let gmax = 2.0 * mu / (lipschitz * lipschitz);
        if !(gamma >= 0.0 && gamma < gmax) {
            return Err(Error::InvalidParameter(format!("step {gamma} outside [0, 2mu/L^2 = {gmax})")));
        }
        Ok(Self { mu, lipschitz, gamma })
    }

    /// The step minimising `q`, namely `mu / L^2`.
    pub fn optimal(mu: f64, lipschitz: f64) -> Result<Self> {
        Self::new(mu, lipschitz, mu / (lipschitz * lipschitz))
    }
}

/// `q = sqrt(1 − 2μγ + γ²L²)`.
pub fn contraction_factor(p: &ContractionParams) -> f64 {
    // Written as (1−γμ)² + γ²(L²−μ²) so the radicand is visibly nonnegative.
    let r = (1.0 - p.gamma * p.mu).powi(2) + p.gamma * p.gamma * (p.lipschitz - p.mu) * (p.lipschitz + p.mu);
    r.max(0.0).sqrt()
}
