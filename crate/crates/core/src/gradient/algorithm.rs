use std::sync::Arc;

use rand::Rng;

use super::schedule::{validate_steplength_conditions, StepConstants, SteplengthSchedule};
use crate::error::{check_dim, Error, Result};
use crate::game::{Game, LearningObjective};
use crate::linalg::{dist, norm, scaled_error};
use crate::rng::{stream_rng, Stream};
use crate::trajectory::{ErrorTrajectory, RecordPolicy, TrajectoryRow};
use crate::vi::ConvexSet;

/// Additive strategy-gradient noise `w_i^k ~ U[−h, h]` per coordinate.
/// Parameter-gradient noise comes from the learning objective's sampler.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    pub strategy_half_width: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    /// `E‖w_i‖²` for a block of dimension `dim`.
    pub fn nu_x_sq(&self, dim: usize) -> f64 {
        dim as f64 * self.strategy_half_width * self.strategy_half_width / 3.0
    }
}

/// Joint iterate: the strategy profile and one parameter estimate per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub x: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
}

/// Named subset of parameter coordinates reported as its own error column.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGroup {
    pub name: String,
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub record: RecordPolicy,
    pub x0: Option<Vec<f64>>,
    /// Common starting estimate for every agent (default: box midpoint).
    pub theta0: Option<Vec<f64>>,
    pub theta_groups: Vec<ThetaGroup>,
    /// When set, the steplength requirements are checked before running.
    pub step_constants: Option<StepConstants>,
    /// Run even when a validator refuses.
    pub force: bool,
    /// Adds `x_err_sq`, `theta_err_sq_sum` and `theta_err_sq_max` columns.
    pub squared_errors: bool,
}

fn agent_sets<G: Game + ?Sized>(game: &G) -> Vec<Arc<dyn ConvexSet>> {
    (0..game.n_agents()).map(|i| game.agent_set(i)).collect()
}

/// One synchronous iteration: every agent reads the same snapshot `x^k`.
#[allow(clippy::too_many_arguments)]
pub fn step<G, L>(
    state: &JointState,
    k: usize,
    game: &G,
    objective: &L,
    schedule: &SteplengthSchedule,
    noise: &NoiseSpec,
    seed: u64,
) -> JointState
where
    G: Game + ?Sized,
    L: LearningObjective + ?Sized,
{
    step_with_sets(state, k, game, &agent_sets(game), objective, &objective.gain(), schedule, noise, seed)
}

#[allow(clippy::too_many_arguments)]
fn step_with_sets<G, L>(
    state: &JointState,
    k: usize,
    game: &G,
    sets: &[Arc<dyn ConvexSet>],
    objective: &L,
    gain: &[f64],
    schedule: &SteplengthSchedule,
    noise: &NoiseSpec,
    seed: u64,
) -> JointState
where
    G: Game + ?Sized,
    L: LearningObjective + ?Sized,
{
    let mut next = state.clone();
    let m = objective.dim();
    let mut g = vec![0.0; m];
    for (i, set) in sets.iter().enumerate() {
        let r = game.block(i);
        let mut grad = vec![0.0; r.len()];
        game.partial_gradient(i, &state.x, &state.thetas[i], &mut grad);
        if noise.strategy_half_width > 0.0 {
            let h = noise.strategy_half_width;
            let mut rng = stream_rng(seed, Stream::StrategyNoise, i as u64, k as u64);
            for v in grad.iter_mut() {
                *v += rng.gen_range(-h..=h);
            }
        }
        let gamma = schedule.gamma(i, k);
        let y: Vec<f64> = state.x[r.clone()].iter().zip(&grad).map(|(x, d)| x - gamma * d).collect();
        set.project_into(&y, &mut next.x[r]);

        let mut rng = stream_rng(seed, Stream::Learning, i as u64, k as u64);
        objective.sampled_gradient(&state.thetas[i], &mut rng, &mut g);
        let alpha = schedule.alpha(i, k);
        let bx = objective.theta_box();
        for j in 0..m {
            next.thetas[i][j] = bx.project_scalar(j, state.thetas[i][j] - alpha * gain[j] * g[j]);
        }
    }
    next
}

/// Runs `horizon` iterations and records scaled errors against `(x_ref, theta_ref)`.
#[allow(clippy::too_many_arguments)]
pub fn run_algorithm_one<G, L>(
    game: &G,
    objective: &L,
    schedule: &SteplengthSchedule,
    noise: &NoiseSpec,
    horizon: usize,
    seed: u64,
    x_ref: &[f64],
    theta_ref: &[f64],
    opts: &RunOptions,
) -> Result<ErrorTrajectory>
where
    G: Game + ?Sized,
    L: LearningObjective + ?Sized,
{
    let n = game.n_agents();
    check_dim(game.dim(), x_ref.len())?;
    check_dim(game.theta_dim(), objective.dim())?;
    check_dim(objective.dim(), theta_ref.len())?;
    check_dim(n, schedule.n_agents())?;
    schedule.validate()?;
    if !(objective.strong_convexity() > 0.0) && !opts.force {
        return Err(Error::Validation("learning objective is not strongly convex".into()));
    }
    if let Some(c) = &opts.step_constants {
        let report = validate_steplength_conditions(schedule, horizon, c)?;
        if !report.all_passed() && !opts.force {
            let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
            return Err(Error::Validation(format!("steplength requirements fail: {names:?}")));
        }
    }
    for g in &opts.theta_groups {
        if g.coords.iter().any(|&j| j >= theta_ref.len()) {
            return Err(Error::InvalidParameter(format!("group {} indexes past θ", g.name)));
        }
    }

    let sets = agent_sets(game);
    let x0 = match &opts.x0 {
        Some(x) => {
            check_dim(game.dim(), x.len())?;
            x.clone()
        }
        None => {
            let mut x = vec![0.0; game.dim()];
            for (i, set) in sets.iter().enumerate() {
                let r = game.block(i);
                let zero = vec![0.0; r.len()];
                set.project_into(&zero, &mut x[r]);
            }
            x
        }
    };
    for (i, set) in sets.iter().enumerate() {
        if !set.contains(&x0[game.block(i)], 1e-9) {
            return Err(Error::Validation(format!("initial strategy of agent {i} is infeasible")));
        }
    }
    let bx = objective.theta_box();
    let theta0 = match &opts.theta0 {
        Some(t) => {
            check_dim(bx.dim(), t.len())?;
            if !bx.contains(t, 0.0) {
                return Err(Error::Validation("initial estimate outside the parameter box".into()));
            }
            t.clone()
        }
        None => bx.midpoint(),
    };

    let mut columns: Vec<&str> = opts.theta_groups.iter().map(|g| g.name.as_str()).collect();
    if opts.squared_errors {
        columns.extend(["x_err_sq", "theta_err_sq_sum", "theta_err_sq_max"]);
    }
    let mut traj = ErrorTrajectory::new(&columns);
    let gain = objective.gain();
    let group_refs: Vec<Vec<f64>> =
        opts.theta_groups.iter().map(|g| g.coords.iter().map(|&j| theta_ref[j]).collect()).collect();

    let mut state = JointState { x: x0, thetas: vec![theta0; n] };
    let x_ref_norm = norm(x_ref);
    for k in 0..=horizon {
        if opts.record.records(k, horizon) {
            let mut extra: Vec<f64> = opts
                .theta_groups
                .iter()
                .zip(&group_refs)
                .map(|(g, r)| {
                    state
                        .thetas
                        .iter()
                        .map(|t| {
                            let v: Vec<f64> = g.coords.iter().map(|&j| t[j]).collect();
                            scaled_error(&v, r)
                        })
                        .fold(0.0, f64::max)
                })
                .collect();
            if opts.squared_errors {
                let dx = dist(&state.x, x_ref);
                extra.push(dx * dx);
                let sq: Vec<f64> = state.thetas.iter().map(|t| dist(t, theta_ref).powi(2)).collect();
                extra.push(sq.iter().sum());
                extra.push(sq.iter().copied().fold(0.0, f64::max));
            }
            traj.push(TrajectoryRow {
                k,
                err_x: dist(&state.x, x_ref) / (1.0 + x_ref_norm),
                err_theta: state.thetas.iter().map(|t| scaled_error(t, theta_ref)).fold(0.0, f64::max),
                gamma_max: schedule.gamma_max(k),
                alpha_max: schedule.alpha_max(k),
                extra,
            })?;
        }
        if k == horizon {
            break;
        }
        state = step_with_sets(&state, k, game, &sets, objective, &gain, schedule, noise, seed);
        for (i, set) in sets.iter().enumerate() {
            debug_assert!(set.contains(&state.x[game.block(i)], 1e-9));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{AffineGame, QuadraticObjective, ThetaBox};
    use crate::vi::BoxSet;
    use nalgebra::{DMatrix, DVector};

    fn one_agent() -> (AffineGame, QuadraticObjective) {
        // f = (x − 3)²  ⇒  ∇f = 2x − 6; θ plays no role.
        let g = AffineGame::new(
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::zeros(1, 1),
            DVector::from_element(1, -6.0),
            vec![BoxSet::cube(1, 0.0, 10.0).unwrap()],
        )
        .unwrap();
        let obj = QuadraticObjective::new(vec![2.0], 1.0, 0.0, ThetaBox::scalar(1.0, 5.0).unwrap()).unwrap();
        (g, obj)
    }

    #[test]
    fn hand_steps() {
        let (g, obj) = one_agent();
        let s = SteplengthSchedule::Constant { gamma: vec![0.5], alpha: vec![1.0] };
        let st = JointState { x: vec![0.0], thetas: vec![vec![5.0]] };
        let next = step(&st, 0, &g, &obj, &s, &NoiseSpec::none(), 0);
        assert_eq!(next.x, vec![3.0]);
        assert_eq!(next.thetas, vec![vec![2.0]]);
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let (g, obj) = one_agent();
        let s = SteplengthSchedule::Constant { gamma: vec![0.3], alpha: vec![0.7] };
        let st = JointState { x: vec![3.0], thetas: vec![vec![2.0]] };
        assert_eq!(step(&st, 4, &g, &obj, &s, &NoiseSpec::none(), 9), st);
    }

    #[test]
    fn zero_horizon_records_initial_errors() {
        let (g, obj) = one_agent();
        let s = SteplengthSchedule::Constant { gamma: vec![0.3], alpha: vec![0.7] };
        let t =
            run_algorithm_one(&g, &obj, &s, &NoiseSpec::none(), 0, 1, &[3.0], &[2.0], &RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].k, 0);
        assert!((t.rows[0].err_x - 3.0 / 4.0).abs() < 1e-15);
        assert!((t.rows[0].err_theta - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn refuses_bad_schedules_unless_forced() {
        let (g, obj) = one_agent();
        let s = SteplengthSchedule::Constant { gamma: vec![0.3], alpha: vec![0.7] };
        let mut opts = RunOptions {
            step_constants: Some(StepConstants { mu_x: 2.0, mu_theta: 1.0, l_theta: 0.0 }),
            ..RunOptions::default()
        };
        let r = run_algorithm_one(&g, &obj, &s, &NoiseSpec::none(), 5, 1, &[3.0], &[2.0], &opts);
        assert!(matches!(r, Err(Error::Validation(_))));
        opts.force = true;
        assert!(run_algorithm_one(&g, &obj, &s, &NoiseSpec::none(), 5, 1, &[3.0], &[2.0], &opts).is_ok());
    }
}
