//! Steplength schedules, their admissibility checks, the one-step recursion
//! constants and the rate constants for harmonic steps.
//!
//! `cargo run --example steplengths`

use nash_learn::bench::rate_duopoly;
use nash_learn::game::Game;
use nash_learn::gradient::{
    make_schedule, rate_bound_constants, recursion_constants, validate_steplength_conditions, ProblemConstants,
    RateLambdas, StepConstants, SteplengthSchedule,
};

fn main() -> nash_learn::Result<()> {
    let (game, _, _) = rate_duopoly()?;
    let (mu_x, l_x, l_theta) = (game.strong_monotonicity(), game.lipschitz(), game.theta_lipschitz());
    let consts = StepConstants { mu_x, mu_theta: 1.0, l_theta };

    let power = make_schedule(0.8, 0.6, (1, 200), game.n_agents(), 1)?;
    let report = validate_steplength_conditions(&power, 10_000, &consts)?;
    println!("power-law schedule (0.8, 0.6):");
    for c in &report.checks {
        println!("  {:<28} {:5} {}", c.name, c.passed, c.note);
    }
    for k in [0, 100, 10_000] {
        let (zeta, beta) = recursion_constants(k, &power, mu_x, l_x, l_theta, 1.0, 0.0);
        println!("  k = {k:>5}: zeta = {zeta:.6}, beta = {beta:.3e}");
    }

    let swapped = make_schedule(0.6, 0.8, (1, 200), 2, 1);
    println!("exponents (0.6, 0.8): {}", swapped.err().map(|e| e.to_string()).unwrap_or_default());

    let harmonic = SteplengthSchedule::Harmonic { lambda_x: vec![2.4, 2.5], lambda_theta: vec![1.0, 1.2] };
    let problem = ProblemConstants { mu_x, l_x, l_theta, mu_theta: 1.0, m: 6.0, m_theta: 2.5 };
    let bound = rate_bound_constants(&problem, &RateLambdas::from_schedule(&harmonic)?, 1.0, 2.0, 2)?;
    println!("harmonic steps: E|x^K − x*|² ≤ {:.1}/K, E|θ^K − θ*|² ≤ {:.2}/K", bound.q_x_theta, bound.q_theta);
    Ok(())
}
