//! Without price noise the fixed-point scheme recovers the true parameter
//! after one observation and the equilibrium at the next step.
//!
//! `cargo run --example noise_free`

use nash_learn::bench::{generate_instance, reference_single_market, single_market_from, ReferenceConfig};
use nash_learn::fixed_point::{run_noise_free, EpsSchedule, FixedPointOptions};
use nash_learn::game::LearnTarget;
use nash_learn::linalg::dist;

fn main() -> nash_learn::Result<()> {
    for seed in 1..=3 {
        let inst = generate_instance(4, 1, seed)?;
        for target in [LearnTarget::A, LearnTarget::B] {
            let spec = single_market_from(inst.network_spec()?, target)?;
            let x_star = reference_single_market(&spec, spec.theta_star(), &ReferenceConfig::default())?.x;
            let out = run_noise_free(&spec, &EpsSchedule::default(), &FixedPointOptions::default())?;
            let theta_err = out.theta_hat_1.iter().map(|t| (t - spec.theta_star()).abs()).fold(0.0, f64::max);
            let x_err = out.x_2.iter().map(|x| dist(x, &x_star)).fold(0.0, f64::max);
            println!("seed {seed} {target:?}: |theta_hat^1 − theta*| = {theta_err:.1e}, |x^2 − x*| = {x_err:.1e}");
        }
    }
    Ok(())
}
