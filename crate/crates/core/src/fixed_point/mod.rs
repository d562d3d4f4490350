//! Algorithm II: regularised fixed-point iteration with price-based learning
//! for Cournot markets whose total output agents cannot observe.

mod algorithm;
mod belief;
mod subproblem;

pub use algorithm::{
    classify_subproblem_jacobian, run_algorithm_two, run_noise_free, run_nonlinear, FixedPointOptions,
    NoiseFreeOutcome, FIXED_POINT_COLUMNS, INVARIANT_TOL,
};
pub use belief::{
    blend_theta_hat, compute_vartheta, update_running_mean, Belief, EpsSchedule, PriceObservation, MIN_AGGREGATE,
};
pub use subproblem::{solve_agent_subproblem, Subproblem, SubproblemMethod, SubproblemSolution};
