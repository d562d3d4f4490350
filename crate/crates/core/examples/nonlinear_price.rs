//! Learning the intercept of a power price `p = a − b·X^σ`. The scheme
//! refuses exponents for which the subproblems can lose uniqueness.
//!
//! `cargo run --release --example nonlinear_price -- [sigma] [steps]`

use nash_learn::bench::{
    checkpoints, generate_instance, market_noise, reference_single_market, single_market_from, with_power_price,
    ReferenceConfig,
};
use nash_learn::fixed_point::{run_nonlinear, EpsSchedule, FixedPointOptions};
use nash_learn::game::{power_admissible, LearnTarget};

fn main() -> nash_learn::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sigma = args.first().copied().unwrap_or(1.1);
    let steps = args.get(1).copied().unwrap_or(2_000.0) as usize;

    let inst = generate_instance(5, 1, 1)?;
    let linear = single_market_from(inst.network_spec()?, LearnTarget::A)?;
    for s in [1.1, 1.5, 2.0] {
        println!("sigma = {s}: admissible for N = 5? {}", power_admissible(5, s));
    }
    let spec = with_power_price(&linear, sigma)?;
    let x_ref = reference_single_market(&spec, spec.theta_star(), &ReferenceConfig::default())?.x;
    let noise = market_noise(&spec, 0.5, 0)?;
    let t = run_nonlinear(
        &spec,
        &noise,
        &EpsSchedule::default(),
        steps,
        1,
        &x_ref,
        spec.theta_star(),
        &FixedPointOptions::default(),
    )?;
    let ks = checkpoints(steps);
    for row in t.rows.iter().filter(|r| ks.contains(&r.k)) {
        println!("k = {:>6}: err_x {:.3e}, err_a {:.3e}", row.k, row.err_x, row.err_theta);
    }
    Ok(())
}
