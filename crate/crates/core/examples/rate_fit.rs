//! Empirical convergence rate under harmonic steps against the theoretical
//! `Q/K` mean-squared error bounds.
//!
//! `cargo run --release --example rate_fit -- [steps] [seeds]`

use nash_learn::bench::{run_rate_fit, ExperimentConfig, ExperimentKind};

fn main() -> nash_learn::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut config = ExperimentConfig::new(ExperimentKind::RateFit);
    config.horizon = args.first().copied().unwrap_or(10_000);
    config.seeds = (1..=args.get(1).copied().unwrap_or(30) as u64).collect();
    let r = run_rate_fit(&config)?;
    println!("fitted slope {:.3} (r² {:.4}) over {} checkpoints", r.fit.slope, r.fit.r_squared, r.fit.points);
    println!("{:>7} {:>12} {:>12} {:>12} {:>12}", "K", "E|x−x*|²", "Q_x/K", "E|θ−θ*|²", "Q_θ/K");
    for &(k, x, t) in r.checkpoints.iter().filter(|c| c.0.is_power_of_two() || c.0 % 1000 == 0) {
        let kf = k as f64;
        println!("{k:>7} {x:>12.3e} {:>12.3e} {t:>12.3e} {:>12.3e}", r.bound.q_x_theta / kf, r.bound.q_theta / kf);
    }
    println!("bound violations: {:?}", r.bound_violations());
    Ok(())
}
