//! Benchmark instances, reference equilibria, experiment drivers and statistics.

mod experiments;
mod instance;
mod reference;
mod stats;

pub use experiments::{
    checkpoints, rate_duopoly, run_fp_table, run_grad_table, run_noise_free_table, run_rate_fit, run_seq_vs_sim,
    run_sequential, run_table, write_manifest, ExperimentConfig, ExperimentKind, MetricSummary, RateFitResult,
    RowResult, TableResult, TrajectoryRecord, SEQ_BOUND_UNIT,
};
pub use instance::{generate_instance, market_noise, single_market_from, with_power_price, FIRST_FIRM_LOWER};
pub use reference::{
    reference_network, reference_single_market, tikhonov_reference, LadderStep, ReferenceConfig, ReferenceSolution,
};
pub use stats::{column_value, fit_log_log, fit_rate_slope, mean, mean_over_seeds, median, std_error, SlopeFit};
