//! Per-step behaviour of the gradient scheme against its recursion constants.

use nash_learn::bench::{mean, rate_duopoly, std_error};
use nash_learn::game::{Game, QuadraticObjective, ThetaBox};
use nash_learn::gradient::{make_schedule, recursion_constants, step, JointState, NoiseSpec, SteplengthSchedule};
use nash_learn::vi::{contraction_factor, ContractionParams, ConvexSet};

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

#[test]
fn seed_averaged_errors_respect_the_one_step_recursion() {
    let (game, x_star, a_star) = rate_duopoly().unwrap();
    let objective = QuadraticObjective::new(vec![a_star], 1.0, 1.0, ThetaBox::scalar(1.0, 5.0).unwrap()).unwrap();
    let schedule = make_schedule(0.8, 0.6, (1, 200), game.n_agents(), 11).unwrap();
    let noise = NoiseSpec { strategy_half_width: 0.5 };
    let nu_x = (game.n_agents() as f64 * noise.nu_x_sq(1)).sqrt();
    let (mu_x, l_x, l_theta) = (game.strong_monotonicity(), game.lipschitz(), game.theta_lipschitz());

    let (seeds, horizon) = (40u64, 1500usize);
    let mut states: Vec<JointState> =
        (0..seeds).map(|_| JointState { x: vec![0.0, 3.0], thetas: vec![vec![1.0]; game.n_agents()] }).collect();
    let (mut checked, mut held) = (0, 0);
    for k in 0..horizon {
        let errs: Vec<f64> = states.iter().map(|s| sq_dist(&s.x, &x_star)).collect();
        let betas: Vec<f64> = states
            .iter()
            .map(|s| {
                let theta_sum: f64 = s.thetas.iter().map(|t| (t[0] - a_star).powi(2)).sum();
                recursion_constants(k, &schedule, mu_x, l_x, l_theta, theta_sum, nu_x).1
            })
            .collect();
        let (zeta, _) = recursion_constants(k, &schedule, mu_x, l_x, l_theta, 0.0, nu_x);
        states = states
            .iter()
            .enumerate()
            .map(|(i, s)| step(s, k, &game, &objective, &schedule, &noise, i as u64 + 1))
            .collect();
        let next: Vec<f64> = states.iter().map(|s| sq_dist(&s.x, &x_star)).collect();
        checked += 1;
        if mean(&next) <= zeta * mean(&errs) + mean(&betas) + 3.0 * std_error(&next) {
            held += 1;
        }
    }
    assert!(held as f64 >= 0.95 * checked as f64, "recursion held at {held} of {checked} steps");
}

#[test]
fn noise_free_homogeneous_steps_contract_every_iteration() {
    let (game, x_star, a_star) = rate_duopoly().unwrap();
    let objective = QuadraticObjective::new(vec![a_star], 1.0, 0.0, ThetaBox::scalar(1.0, 5.0).unwrap()).unwrap();
    let (mu, l) = (game.strong_monotonicity(), game.lipschitz());
    let gamma = 0.9 * 2.0 * mu / (l * l);
    let q = contraction_factor(&ContractionParams::new(mu, l, gamma).unwrap());
    let schedule = SteplengthSchedule::Constant { gamma: vec![gamma; 2], alpha: vec![0.5; 2] };
    let mut s = JointState { x: vec![0.0, 3.0], thetas: vec![vec![a_star]; 2] };
    for k in 0..200 {
        let next = step(&s, k, &game, &objective, &schedule, &NoiseSpec::none(), 1);
        let (before, after) = (sq_dist(&s.x, &x_star).sqrt(), sq_dist(&next.x, &x_star).sqrt());
        assert!(after <= q * before * (1.0 + 1e-12) + 1e-15, "k={k}: {after} > {q}·{before}");
        assert!(game.joint_set().contains(&next.x, 0.0));
        s = next;
    }
}
