//! Learn-then-compute against joint learning and computation, at equal
//! budgets of observations.
//!
//! `cargo run --release --example seq_vs_sim -- [steps] [seeds]`

use nash_learn::bench::{run_seq_vs_sim, ExperimentConfig, ExperimentKind};

fn main() -> nash_learn::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut config = ExperimentConfig::new(ExperimentKind::SeqVsSim);
    config.horizon = args.first().copied().unwrap_or(2_000);
    config.seeds = (1..=args.get(1).copied().unwrap_or(5) as u64).collect();
    config.bound_multiples = vec![1.0, 3.0];
    let table = run_seq_vs_sim(&config)?;
    for row in &table.rows {
        println!("{}", row.label);
        for arm in ["seq", "seqpre", "sim"] {
            let x = row.final_metric(&format!("{arm}_err_x")).map(|m| m.median).unwrap_or(f64::NAN);
            let b = row.final_metric(&format!("{arm}_err_b")).map(|m| m.median).unwrap_or(f64::NAN);
            println!("  {arm:<7} median err_x {x:.3e}  err_b {b:.3e}");
        }
    }
    Ok(())
}
