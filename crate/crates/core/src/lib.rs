//! Joint equilibrium computation and parameter learning for stochastic Nash
//! games whose payoff parameters are misspecified.
//!
//! The crate is organised around five layers:
//!
//! * [`game`]: Cournot market and network models, price/noise/cost models,
//!   the compact estimator box and the regression learning problem.
//! * [`vi`]: projections, projection-type variational inequality solvers,
//!   Tikhonov regularisation, monotonicity estimation and P-matrix checks.
//! * [`gradient`]: coupled projected stochastic-gradient strategy updates with
//!   stochastic-approximation learning, steplength schedules and rate constants.
//! * [`fixed_point`]: the regularised iterative fixed-point scheme for
//!   Cournot games where aggregate output cannot be observed.
//! * [`bench`]: benchmark instances, reference equilibria and the experiment
//!   drivers used by the command line tool.
//!
//! Every stochastic routine is driven by counter-based random streams keyed on
//! `(seed, stream, agent, step)`, so results do not depend on thread counts.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod fixed_point;
pub mod game;
pub mod gradient;
pub mod linalg;
pub mod rng;
pub mod roots;
pub mod trajectory;
pub mod vi;

pub use error::{Error, Result};
pub use trajectory::{ErrorTrajectory, TrajectoryRow};
