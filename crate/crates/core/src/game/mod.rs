//! Game models: price, noise and cost models, the estimator box, single-market
//! and networked Cournot games, and the regression learning problem.

mod cost;
mod instance;
mod learning;
mod market;
mod network;
mod price;
mod theta;
mod traits;

pub use cost::CostModel;
pub use instance::{Instance, InstanceGame};
pub use learning::{build_learning_problem, LearningNode, LearningProblem, QuadraticObjective};
pub use market::{power_admissible, SingleMarketCournotSpec};
pub use network::{CournotNetworkSpec, NodeMarket};
pub use price::{eval_price, sample_noisy_price, LearnTarget, NoiseKind, NoiseModel, PriceModel};
pub use theta::ThetaBox;
pub use traits::{AffineGame, Game, LearningObjective};
