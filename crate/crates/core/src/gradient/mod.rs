//! Coupled projected stochastic-gradient strategy updates with
//! stochastic-approximation learning of the misspecified parameter.

mod algorithm;
mod rates;
mod schedule;

pub use algorithm::{run_algorithm_one, step, JointState, NoiseSpec, RunOptions, ThetaGroup};
pub use rates::{rate_bound_constants, recursion_constants, ProblemConstants, RateBound, RateLambdas};
pub use schedule::{
    make_schedule, validate_steplength_conditions, StepCheck, StepConstants, StepReport, SteplengthSchedule,
};
