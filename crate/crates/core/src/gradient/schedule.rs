use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Per-agent strategy steps `γ_i^k` and learning steps `α_i^k`.
///
/// Iterations are counted from `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SteplengthSchedule {
    /// `γ_i^k = (k + N_i)^{−α}`, `α_i^k = (k + M_i)^{−β}`.
    PowerLaw { alpha: f64, beta: f64, x_offsets: Vec<u64>, theta_offsets: Vec<u64> },
    /// `γ_i^k = λ_{x,i}/(k+1)`, `α_i^k = λ_{θ,i}/(k+1)`.
    Harmonic { lambda_x: Vec<f64>, lambda_theta: Vec<f64> },
    /// Fixed steps per agent.
    Constant { gamma: Vec<f64>, alpha: Vec<f64> },
}

/// Power-law schedule with offsets drawn uniformly from `offset_range`.
pub fn make_schedule(
    alpha: f64,
    beta: f64,
    offset_range: (u64, u64),
    n_agents: usize,
    seed: u64,
) -> Result<SteplengthSchedule> {
    if !(0.5 < beta && beta < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "exponents must satisfy 1/2 < beta < alpha < 1, got alpha={alpha}, beta={beta}"
        )));
    }
    let (lo, hi) = offset_range;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!("offset range [{lo}, {hi}] must be positive and ordered")));
    }
    let draw = |i: usize, which: u64| stream_rng(seed, Stream::Schedule, i as u64, which).gen_range(lo..=hi);
    Ok(SteplengthSchedule::PowerLaw {
        alpha,
        beta,
        x_offsets: (0..n_agents).map(|i| draw(i, 0)).collect(),
        theta_offsets: (0..n_agents).map(|i| draw(i, 1)).collect(),
    })
}

impl SteplengthSchedule {
    pub fn n_agents(&self) -> usize {
        match self {
            SteplengthSchedule::PowerLaw { x_offsets, .. } => x_offsets.len(),
            SteplengthSchedule::Harmonic { lambda_x, .. } => lambda_x.len(),
            SteplengthSchedule::Constant { gamma, .. } => gamma.len(),
        }
    }

    pub fn gamma(&self, agent: usize, k: usize) -> f64 {
        match self {
            SteplengthSchedule::PowerLaw { alpha, x_offsets, .. } => {
                ((k as u64 + x_offsets[agent]) as f64).powf(-alpha)
            }
            SteplengthSchedule::Harmonic { lambda_x, .. } => lambda_x[agent] / (k as f64 + 1.0),
            SteplengthSchedule::Constant { gamma, .. } => gamma[agent],
        }
    }

    pub fn alpha(&self, agent: usize, k: usize) -> f64 {
        match self {
            SteplengthSchedule::PowerLaw { beta, theta_offsets, .. } => {
                ((k as u64 + theta_offsets[agent]) as f64).powf(-beta)
            }
            SteplengthSchedule::Harmonic { lambda_theta, .. } => lambda_theta[agent] / (k as f64 + 1.0),
            SteplengthSchedule::Constant { alpha, .. } => alpha[agent],
        }
    }

    fn extremes(&self, k: usize, f: impl Fn(usize, usize) -> f64) -> (f64, f64) {
        (0..self.n_agents()).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let v = f(i, k);
            (lo.min(v), hi.max(v))
        })
    }

    pub fn gamma_min(&self, k: usize) -> f64 {
        self.extremes(k, |i, k| self.gamma(i, k)).0
    }

    pub fn gamma_max(&self, k: usize) -> f64 {
        self.extremes(k, |i, k| self.gamma(i, k)).1
    }

    pub fn alpha_min(&self, k: usize) -> f64 {
        self.extremes(k, |i, k| self.alpha(i, k)).0
    }

    pub fn alpha_max(&self, k: usize) -> f64 {
        self.extremes(k, |i, k| self.alpha(i, k)).1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_agents();
        if n == 0 {
            return Err(Error::InvalidParameter("schedule for zero agents".into()));
        }
        let ok = match self {
            SteplengthSchedule::PowerLaw { alpha, beta, x_offsets, theta_offsets } => {
                theta_offsets.len() == n
                    && *beta > 0.0
                    && *alpha > 0.0
                    && x_offsets.iter().chain(theta_offsets).all(|o| *o > 0)
            }
            SteplengthSchedule::Harmonic { lambda_x, lambda_theta } => {
                lambda_theta.len() == n && lambda_x.iter().chain(lambda_theta).all(|v| *v > 0.0)
            }
            SteplengthSchedule::Constant { gamma, alpha } => {
                alpha.len() == n && gamma.iter().chain(alpha).all(|v| *v > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("malformed steplength schedule {self:?}")))
        }
    }
}

/// Constants entering the coupling condition `α_min ≥ γ_max L_θ²/(μ_x μ_θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConstants {
    pub mu_x: f64,
    pub mu_theta: f64,
    pub l_theta: f64,
}

/// One steplength requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First iteration inside the horizon at which the finite-`k` inequality fails.
    pub first_violation: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub checks: Vec<StepCheck>,
}

impl StepReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&StepCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&StepCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Checks the steplength requirements: analytic tail tests decide pass/fail,
/// and the finite horizon is scanned for the last violation of the coupling
/// inequality.
pub fn validate_steplength_conditions(
    schedule: &SteplengthSchedule,
    horizon: usize,
    c: &StepConstants,
) -> Result<StepReport> {
    if !(c.mu_x > 0.0 && c.mu_theta > 0.0 && c.l_theta >= 0.0) {
        return Err(Error::InvalidParameter(format!("constants must be positive: {c:?}")));
    }
    schedule.validate()?;
    let ratio = c.l_theta * c.l_theta / (c.mu_x * c.mu_theta);
    let coupling_holds = |k: usize| schedule.alpha_min(k) >= schedule.gamma_max(k) * ratio;
    let mut first = None;
    let mut last = None;
    for k in 0..=horizon {
        if !coupling_holds(k) {
            first.get_or_insert(k);
            last = Some(k);
        }
    }
    let mut checks = Vec::new();
    let mut push =
        |name, passed, first_violation, note: String| checks.push(StepCheck { name, passed, first_violation, note });
    match schedule {
        SteplengthSchedule::PowerLaw { alpha, beta, .. } => {
            push("sum_gamma_min_diverges", *alpha <= 1.0, None, format!("k^-{alpha}"));
            push("sum_gamma_max_sq_finite", 2.0 * alpha > 1.0, None, format!("k^-{}", 2.0 * alpha));
            push("sum_alpha_max_sq_finite", 2.0 * beta > 1.0, None, format!("k^-{}", 2.0 * beta));
            push("gamma_spread_vanishes", true, None, "fixed offsets: (γmax−γmin)/γmax = O(1/k)".into());
            push("alpha_sq_over_gamma_vanishes", *alpha < 2.0 * beta, None, format!("ratio ~ k^({alpha} − 2·{beta})"));
            push(
                "coupling",
                beta < alpha,
                first,
                match last {
                    Some(l) if beta < alpha => format!("holds from k = {} within the horizon", l + 1),
                    _ if beta < alpha => "holds on the whole horizon".into(),
                    _ => format!("α_min/γ_max ~ k^({alpha} − {beta}) does not grow"),
                },
            );
        }
        SteplengthSchedule::Harmonic { lambda_x, lambda_theta } => {
            let (lx_min, lx_max) = min_max(lambda_x);
            let (lt_min, lt_max) = min_max(lambda_theta);
            push("sum_gamma_min_diverges", true, None, "harmonic".into());
            push("sum_gamma_max_sq_finite", true, None, "harmonic".into());
            push("sum_alpha_max_sq_finite", true, None, "harmonic".into());
            push(
                "gamma_spread_vanishes",
                lx_max == lx_min,
                None,
                format!("(γmax−γmin)/γmax = {}", (lx_max - lx_min) / lx_max),
            );
            push("alpha_sq_over_gamma_vanishes", true, None, format!("ratio = {}/(k+1)", lt_max * lt_max / lx_max));
            push(
                "coupling",
                lt_min >= lx_max * ratio,
                first,
                format!("λθmin={lt_min}, λxmax·ratio={}", lx_max * ratio),
            );
        }
        SteplengthSchedule::Constant { gamma, alpha } => {
            let (_, gmax) = min_max(gamma);
            let (amin, _) = min_max(alpha);
            let (gmin, _) = min_max(gamma);
            push("sum_gamma_min_diverges", true, None, "constant".into());
            push("sum_gamma_max_sq_finite", false, None, "constant steps are not square summable".into());
            push("sum_alpha_max_sq_finite", false, None, "constant steps are not square summable".into());
            push("gamma_spread_vanishes", gmax == gmin, None, String::new());
            push("alpha_sq_over_gamma_vanishes", false, None, "constant ratio".into());
            push("coupling", amin >= gmax * ratio, first, String::new());
        }
    }
    Ok(StepReport { checks })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}
