use nalgebra::DMatrix;

use super::belief::{blend_theta_hat, compute_vartheta, update_running_mean, Belief, EpsSchedule, PriceObservation};
use super::subproblem::{solve_agent_subproblem, Subproblem, SubproblemMethod};
use crate::error::{check_dim, Error, Result};
use crate::game::{LearnTarget, NoiseKind, NoiseModel, PriceModel, SingleMarketCournotSpec};
use crate::linalg::scaled_error;
use crate::trajectory::{ErrorTrajectory, RecordPolicy, TrajectoryRow};
use crate::vi::{check_p_matrix, PClass, SolverConfig};

/// Slack for the belief-consistency and signal-recovery checks.
pub const INVARIANT_TOL: f64 = 1e-7;

/// Extra trajectory columns written by [`run_algorithm_two`].
pub const FIXED_POINT_COLUMNS: [&str; 3] = ["vartheta_bar_max_dev", "consistency_residual", "vartheta_max_dev"];

/// Steps at which the subproblem Jacobian is classified.
const JACOBIAN_CHECK_STEPS: [usize; 3] = [0, 10, 100];

#[derive(Debug, Clone)]
pub struct FixedPointOptions {
    pub record: RecordPolicy,
    pub method: SubproblemMethod,
    pub solver: SolverConfig,
    /// Classify the subproblem Jacobian at a few steps and fail on a mismatch.
    pub check_jacobian: bool,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            record: RecordPolicy::default(),
            method: SubproblemMethod::default(),
            solver: SolverConfig::default(),
            check_jacobian: true,
        }
    }
}

/// Expected class of the subproblem Jacobian, before and after adding `εI`.
///
/// Learning `a` gives a P-matrix outright; learning `b` only P₀, which the
/// regularisation promotes to P.
pub fn classify_subproblem_jacobian(jac: &DMatrix<f64>, eps: f64) -> Result<(PClass, PClass)> {
    let raw = check_p_matrix(jac)?;
    let reg = check_p_matrix(&(jac + DMatrix::identity(jac.nrows(), jac.ncols()) * eps))?;
    Ok((raw, reg))
}

fn check_jacobian_class(sub: &Subproblem<'_>, z: &[f64], eps: f64) -> Result<()> {
    let (raw, reg) = classify_subproblem_jacobian(&sub.jacobian(z), eps)?;
    let ok = match sub.spec.learn_target {
        LearnTarget::A => raw == PClass::P,
        LearnTarget::B => raw != PClass::Neither && reg == PClass::P,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("subproblem Jacobian at step {} classified {raw:?} (regularised {reg:?})", sub.k)))
    }
}

fn check_noise(spec: &SingleMarketCournotSpec, noise: &NoiseModel) -> Result<()> {
    if noise.kind != NoiseKind::for_target(spec.learn_target) {
        return Err(Error::Validation(format!(
            "learning {:?} needs {:?} noise, got {:?}",
            spec.learn_target,
            NoiseKind::for_target(spec.learn_target),
            noise.kind
        )));
    }
    let tb = &spec.theta_box;
    noise.validate_against(spec.theta_star(), tb.lower[0], tb.upper[0])
}

fn record_row(beliefs: &[Belief], k: usize, x_ref: &[f64], theta_ref: f64, eps: f64, extra: Vec<f64>) -> TrajectoryRow {
    let err_x = beliefs.iter().map(|b| scaled_error(&b.x, x_ref)).fold(0.0, f64::max);
    let err_theta =
        beliefs.iter().map(|b| (b.theta_hat - theta_ref).abs() / (1.0 + theta_ref.abs())).fold(0.0, f64::max);
    TrajectoryRow { k, err_x, err_theta, gamma_max: eps, alpha_max: 1.0 / (k + 1) as f64, extra }
}

fn consistency_residual(beliefs: &[Belief]) -> f64 {
    let mut worst = 0.0f64;
    for b in beliefs {
        for (j, own) in beliefs.iter().enumerate() {
            worst = worst.max((b.x[j] - own.x[j]).abs());
        }
    }
    worst
}

/// Algorithm II on a single market with unobservable total output.
///
/// Each step nature publishes a noisy price at the realised total `Σ_j x_jj`;
/// every agent turns it into a signal `ϑ`, updates its running mean, solves
/// its regularised subproblem and blends the new estimate. The run fails if
/// beliefs drift apart, if a signal differs from `θ* + ξ^k`, or if a
/// sampled subproblem Jacobian has the wrong class.
///
/// Recorded columns: `gamma_max` holds `ε^k` and `alpha_max` the blend weight
/// `1/(k+1)`.
#[allow(clippy::too_many_arguments)]
pub fn run_algorithm_two(
    spec: &SingleMarketCournotSpec,
    noise: &NoiseModel,
    eps: &EpsSchedule,
    horizon: usize,
    seed: u64,
    x_ref: &[f64],
    theta_ref: f64,
    opts: &FixedPointOptions,
) -> Result<ErrorTrajectory> {
    spec.validate()?;
    check_dim(spec.n_firms(), x_ref.len())?;
    check_noise(spec, noise)?;
    let noise = noise.with_seed(seed);
    let case = spec.learn_target;
    let n = spec.n_firms();
    let theta_star = spec.theta_star();
    let truth = spec.price;

    let mut beliefs = vec![Belief::initial(spec); n];
    let mut truth_mean = 0.0;
    let mut traj = ErrorTrajectory::new(&FIXED_POINT_COLUMNS);
    traj.push(record_row(&beliefs, 0, x_ref, theta_ref, eps.eps(0), vec![0.0, 0.0, 0.0]))?;

    for k in 0..horizon {
        let agg: f64 = (0..n).map(|j| beliefs[j].x[j]).sum();
        let xi = if k == 0 { 0.0 } else { noise.draw(k as u64) };
        let obs = PriceObservation::new(noise.apply(&truth, agg, xi), k, agg);

        let mut signal_dev = 0.0f64;
        if k >= 1 {
            truth_mean = ((k - 1) as f64 * truth_mean + theta_star + xi) / k as f64;
            for b in beliefs.iter_mut() {
                let v = compute_vartheta(&obs, b, case, &truth)?;
                let dev = (v - (theta_star + xi)).abs();
                if !(dev <= INVARIANT_TOL) {
                    return Err(Error::Invariant(format!(
                        "step {k}: signal {v} differs from θ*+ξ = {} by {dev:e}",
                        theta_star + xi
                    )));
                }
                signal_dev = signal_dev.max(dev);
                update_running_mean(b, v);
            }
        }

        let e = eps.eps(k);
        let mut next = beliefs.clone();
        for (i, b) in beliefs.iter().enumerate() {
            let sub = Subproblem::new(spec, k, &obs, b);
            let sol = solve_agent_subproblem(&sub, e, opts.method, &opts.solver)?;
            if opts.check_jacobian && i == 0 && JACOBIAN_CHECK_STEPS.contains(&k) {
                let mut z = sol.x.clone();
                z.push(sol.theta);
                check_jacobian_class(&sub, &z, e)?;
            }
            let nb = &mut next[i];
            nb.theta_hat = blend_theta_hat(sol.theta, b.vartheta_bar, k);
            nb.x = sol.x;
            nb.theta = sol.theta;
        }
        beliefs = next;

        let consistency = consistency_residual(&beliefs);
        if !(consistency <= INVARIANT_TOL) {
            return Err(Error::Invariant(format!("step {}: beliefs disagree by {consistency:e}", k + 1)));
        }
        if opts.record.records(k + 1, horizon) {
            let mean_dev = beliefs.iter().map(|b| (b.vartheta_bar - truth_mean).abs()).fold(0.0, f64::max);
            traj.push(record_row(
                &beliefs,
                k + 1,
                x_ref,
                theta_ref,
                eps.eps(k + 1),
                vec![mean_dev, consistency, signal_dev],
            ))?;
        }
    }
    Ok(traj)
}

/// Outcome of the noise-free two-step run.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFreeOutcome {
    /// Every agent's estimate after one step.
    pub theta_hat_1: Vec<f64>,
    /// Every agent's beliefs after the first subproblem solve.
    pub x_1: Vec<Vec<f64>>,
    /// Every agent's strategy beliefs after the second step.
    pub x_2: Vec<Vec<f64>>,
}

/// Noise-free run stopped after two steps.
///
/// After the first regularised solve all beliefs coincide, so the signal
/// extracted from the next price is exactly `θ*`; each agent adopts it as
/// `θ̂¹` and then solves the unregularised equilibrium problem at `θ̂¹`.
pub fn run_noise_free(
    spec: &SingleMarketCournotSpec,
    eps: &EpsSchedule,
    opts: &FixedPointOptions,
) -> Result<NoiseFreeOutcome> {
    spec.validate()?;
    let n = spec.n_firms();
    let case = spec.learn_target;
    let truth = spec.price;
    let beliefs = vec![Belief::initial(spec); n];

    let agg0: f64 = (0..n).map(|j| beliefs[j].x[j]).sum();
    let obs0 = PriceObservation::new(truth.price(agg0), 0, agg0);
    let mut after = Vec::with_capacity(n);
    for b in &beliefs {
        let sub = Subproblem::new(spec, 0, &obs0, b);
        let sol = solve_agent_subproblem(&sub, eps.eps(0), opts.method, &opts.solver)?;
        let mut nb = b.clone();
        nb.theta_hat = blend_theta_hat(sol.theta, b.vartheta_bar, 0);
        nb.x = sol.x;
        nb.theta = sol.theta;
        after.push(nb);
    }
    let consistency = consistency_residual(&after);
    if !(consistency <= INVARIANT_TOL) {
        return Err(Error::Invariant(format!("step 1: beliefs disagree by {consistency:e}")));
    }

    let agg1: f64 = (0..n).map(|j| after[j].x[j]).sum();
    let obs1 = PriceObservation::new(truth.price(agg1), 1, agg1);
    let mut theta_hat_1 = Vec::with_capacity(n);
    let mut x_2 = Vec::with_capacity(n);
    for b in &after {
        let th = compute_vartheta(&obs1, b, case, &truth)?;
        theta_hat_1.push(th);
        x_2.push(spec.equilibrium(th));
    }
    Ok(NoiseFreeOutcome { theta_hat_1, x_1: after.into_iter().map(|b| b.x).collect(), x_2 })
}

/// Algorithm II with a power price `a − bX^σ`, learning `a` under additive noise.
#[allow(clippy::too_many_arguments)]
pub fn run_nonlinear(
    spec: &SingleMarketCournotSpec,
    noise: &NoiseModel,
    eps: &EpsSchedule,
    horizon: usize,
    seed: u64,
    x_ref: &[f64],
    theta_ref: f64,
    opts: &FixedPointOptions,
) -> Result<ErrorTrajectory> {
    if !matches!(spec.price, PriceModel::Power { .. }) || spec.learn_target != LearnTarget::A {
        return Err(Error::Validation("the nonlinear scheme needs a power price and learns the intercept".into()));
    }
    run_algorithm_two(spec, noise, eps, horizon, seed, x_ref, theta_ref, opts)
}
