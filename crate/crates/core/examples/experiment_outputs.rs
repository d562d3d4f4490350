//! Runs a small experiment table and writes per-seed trajectory CSVs, a
//! summary and a manifest, the same files the command line tool produces.
//!
//! `cargo run --release --example experiment_outputs -- [out_dir]`

use std::path::PathBuf;

use nash_learn::bench::{run_table, ExperimentConfig, ExperimentKind};

fn main() -> nash_learn::Result<()> {
    let dir =
        std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("nash_learn_outputs"));
    let mut config = ExperimentConfig::new(ExperimentKind::FpTableA);
    config.rows = vec![(3, 1)];
    config.horizon = 1_000;
    config.seeds = vec![1, 2, 3];
    config.out = Some(dir.clone());
    let table = run_table(&config)?;
    print!("{}", table.console());
    for p in table.write_outputs(&dir, &config)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
