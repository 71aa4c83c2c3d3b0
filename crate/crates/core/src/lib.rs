//! Pareto-dominance evolutionary algorithm for the 0-1 knapsack problem.
//!
//! The constrained problem is treated as two objectives, maximise the total
//! value and minimise the weight excess over capacity. The crate provides
//! the algorithm ([`moea`]), its greedy and local-search initialisations
//! ([`init`]), two adversarial instance families with catalogs of their
//! named solution classes ([`instances`]), exact oracles ([`oracle`]) and an
//! experiment harness ([`harness`]) used by the `knapsack-moea` binary.

pub mod error;
pub mod harness;
pub mod init;
pub mod instances;
pub mod moea;
pub mod mutation;
pub mod numfmt;
pub mod oracle;
pub mod pareto;
pub mod problem;
pub mod rng;

pub use error::{Error, Result};
pub use moea::{MoeaConfig, Population, TrialTrajectory};
pub use mutation::bitwise_mutate;
pub use pareto::{dominates, nondominated_filter};
pub use problem::{
    approximation_ratio, evaluate, EvaluatedSolution, Evaluation, Item, KnapsackInstance, Solution,
};
pub use rng::RandomStream;
