use super::schedule::SteplengthSchedule;
use crate::error::{Error, Result};

/// Problem constants of the joint scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    /// Strong monotonicity of `F(·; θ*)`.
    pub mu_x: f64,
    /// Lipschitz constant of `F` in `x`.
    pub l_x: f64,
    /// Lipschitz constant of each `F_i` in `θ`.
    pub l_theta: f64,
    /// Strong convexity of the learning objective.
    pub mu_theta: f64,
    /// `E‖F_i + w_i‖² ≤ M²/N` for every player.
    pub m: f64,
    /// `E‖∇g + v‖² ≤ M_θ²`.
    pub m_theta: f64,
}

/// Extremes of the harmonic step multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateLambdas {
    pub x_min: f64,
    pub x_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl RateLambdas {
    pub fn from_schedule(s: &SteplengthSchedule) -> Result<Self> {
        match s {
            SteplengthSchedule::Harmonic { lambda_x, lambda_theta } => {
                let mm = |v: &[f64]| v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
                let (x_min, x_max) = mm(lambda_x);
                let (theta_min, theta_max) = mm(lambda_theta);
                Ok(Self { x_min, x_max, theta_min, theta_max })
            }
            _ => Err(Error::InvalidParameter("rate constants need harmonic steps".into())),
        }
    }
}

/// Mean-squared error bounds `E‖θ^K−θ*‖² ≤ Q_θ/K` and `E‖x^K−x*‖² ≤ Q_{x,θ}/K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    pub q_theta: f64,
    pub q_x_theta: f64,
}

/// Computes `Q_θ` and `Q_{x,θ}`. `theta0_err_sq` is `max_i E‖θ_i⁰−θ*‖²` and
/// `x0_err_sq` is `E‖x⁰−x*‖²`.
pub fn rate_bound_constants(
    c: &ProblemConstants,
    l: &RateLambdas,
    theta0_err_sq: f64,
    x0_err_sq: f64,
    n_agents: usize,
) -> Result<RateBound> {
    let den_theta = 2.0 * c.mu_theta * l.theta_min - 1.0;
    if !(den_theta > 0.0) {
        return Err(Error::Validation(format!("need 2 μθ λθ,min > 1, got {}", den_theta + 1.0)));
    }
    let den_x = c.mu_x * l.x_max - 2.0 * (l.x_max - l.x_min) * c.l_x - 1.0;
    if !(den_x > 0.0) {
        return Err(Error::Validation(format!("need μx λx,max − 2(λx,max − λx,min) Lx > 1, got {}", den_x + 1.0)));
    }
    let q_theta = (l.theta_max * l.theta_max * c.m_theta * c.m_theta / den_theta).max(theta0_err_sq);
    let lx2 = l.x_max * l.x_max;
    let q_x_theta =
        ((lx2 * c.m * c.m + lx2 * c.l_theta * c.l_theta * n_agents as f64 * q_theta) / den_x).max(x0_err_sq);
    Ok(RateBound { q_theta, q_x_theta })
}

/// One-step recursion constants `(ζ_k, β_k)` with
/// `E[‖x^{k+1}−x*‖² | F_k] ≤ ζ_k ‖x^k−x*‖² + β_k`.
///
/// `theta_err_sq_sum` is `Σ_i ‖θ_i^k − θ*‖²`.
pub fn recursion_constants(
    k: usize,
    schedule: &SteplengthSchedule,
    mu_x: f64,
    l_x: f64,
    l_theta: f64,
    theta_err_sq_sum: f64,
    nu_x: f64,
) -> (f64, f64) {
    let (gmax, gmin) = (schedule.gamma_max(k), schedule.gamma_min(k));
    recursion_constants_from_steps(gmax, gmin, mu_x, l_x, l_theta, theta_err_sq_sum, nu_x)
}

pub(crate) fn recursion_constants_from_steps(
    gmax: f64,
    gmin: f64,
    mu_x: f64,
    l_x: f64,
    l_theta: f64,
    theta_err_sq_sum: f64,
    nu_x: f64,
) -> (f64, f64) {
    let zeta = 1.0 - gmax * mu_x + 2.0 * (gmax - gmin) * l_x + 2.0 * gmax * gmax * l_x * l_x;
    let lt2 = l_theta * l_theta;
    let beta = (2.0 * gmax * gmax * lt2 + gmax * lt2 / mu_x) * theta_err_sq_sum + gmax * gmax * nu_x * nu_x;
    (zeta, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(m_theta: f64) -> ProblemConstants {
        ProblemConstants { mu_x: 1.0, l_x: 3.0, l_theta: 1.0, mu_theta: 1.0, m: 2.0, m_theta }
    }

    #[test]
    fn q_theta_examples() {
        let l = RateLambdas { x_min: 2.0, x_max: 2.0, theta_min: 1.0, theta_max: 1.0 };
        let r = rate_bound_constants(&consts(1.0), &l, 0.0, 0.0, 2).unwrap();
        assert_eq!(r.q_theta, 1.0);
        let r0 = rate_bound_constants(&consts(0.0), &l, 0.0, 0.0, 2).unwrap();
        assert_eq!(r0.q_theta, 0.0);
        // Homogeneous λx: denominator μx λx − 1 = 1.
        assert_eq!(r0.q_x_theta, 4.0 * 4.0);
    }

    #[test]
    fn hypotheses_enforced() {
        let l = RateLambdas { x_min: 2.0, x_max: 2.0, theta_min: 0.4, theta_max: 0.4 };
        assert!(rate_bound_constants(&consts(1.0), &l, 0.0, 0.0, 2).is_err());
        let l = RateLambdas { x_min: 1.0, x_max: 2.0, theta_min: 1.0, theta_max: 1.0 };
        assert!(rate_bound_constants(&consts(1.0), &l, 0.0, 0.0, 2).is_err());
    }

    #[test]
    fn recursion_examples() {
        let (z, b) = recursion_constants_from_steps(0.0, 0.0, 2.0, 3.0, 1.0, 5.0, 1.0);
        assert_eq!((z, b), (1.0, 0.0));
        let (z, _) = recursion_constants_from_steps(0.01, 0.01, 2.0, 3.0, 1.0, 0.0, 0.0);
        assert!((z - (1.0 - 0.02 + 2.0 * 1e-4 * 9.0)).abs() < 1e-15);
        let (_, b) = recursion_constants_from_steps(0.3, 0.1, 2.0, 3.0, 1.0, 0.0, 0.0);
        assert_eq!(b, 0.0);
    }
}
