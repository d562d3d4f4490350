//! The regularised fixed-point scheme on a single market, learning either the
//! price intercept (the aggregate is observed through the price) or the
//! slope, with the invariants checked along the way.
//!
//! `cargo run --release --example fixed_point -- [a|b] [steps] [seed]`

use nash_learn::bench::{
    checkpoints, generate_instance, market_noise, reference_single_market, single_market_from, ReferenceConfig,
};
use nash_learn::fixed_point::{run_algorithm_two, EpsSchedule, FixedPointOptions};
use nash_learn::game::LearnTarget;

fn main() -> nash_learn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let target = if args.first().map(String::as_str) == Some("b") { LearnTarget::B } else { LearnTarget::A };
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let inst = generate_instance(5, 1, 1)?;
    let spec = single_market_from(inst.network_spec()?, target)?;
    let theta_star = spec.theta_star();
    let x_ref = reference_single_market(&spec, theta_star, &ReferenceConfig::default())?.x;
    let noise = market_noise(&spec, 0.5, 0)?;
    println!("learning {target:?}: true value {theta_star:.4}, box {:?}", spec.theta_box);

    let t = run_algorithm_two(
        &spec,
        &noise,
        &EpsSchedule::default(),
        steps,
        seed,
        &x_ref,
        theta_star,
        &FixedPointOptions::default(),
    )?;
    let ks = checkpoints(steps);
    println!("{:>6} {:>10} {:>10} {:>12} {:>12}", "k", "err_x", "err_theta", "eps", "vartheta_dev");
    for row in t.rows.iter().filter(|r| ks.contains(&r.k)) {
        println!(
            "{:>6} {:>10.3e} {:>10.3e} {:>12.3e} {:>12.1e}",
            row.k,
            row.err_x,
            row.err_theta,
            row.gamma_max,
            t.extra(row, "vartheta_max_dev").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
