//! Unimodal multi-armed bandits.
//!
//! Arms sit on the vertices of a graph along which expected rewards are
//! unimodal. The [`policy`] module holds OSUB and UCB-U (which only explore
//! the current leader's neighbourhood), their sliding-window variants for
//! drifting rewards, plain UCB / KL-UCB baselines and UCB(delta) for a
//! continuous arm set. [`harness`] runs batches of experiments reproducibly.
//!
//! ```
//! use unibandit::{UnimodalGraph, StationaryBernoulliEnv, LeaderPolicy, Policy, RewardStream};
//! use unibandit::{Environment, kl::ThresholdConfig};
//!
//! let graph = UnimodalGraph::line(5).unwrap();
//! let env = StationaryBernoulliEnv::new(graph.clone(), vec![0.1, 0.3, 0.7, 0.4, 0.2]).unwrap();
//! let mut osub = LeaderPolicy::osub(graph, ThresholdConfig::default());
//! let mut stream = RewardStream::new(1, 0);
//! for round in 1..=1_000 {
//!     let arm = osub.select(round);
//!     let reward = env.sample(arm, round, &mut stream);
//!     osub.observe(arm, reward).unwrap();
//! }
//! ```

pub mod analysis;
pub mod config;
pub mod env;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kl;
pub mod policy;
pub mod presets;
pub mod stream;

pub use analysis::{lower_bound_c, RegretCurve, RunTrace};
pub use config::{EnvSpec, ExperimentConfig, GraphSpec, PolicySpec};
pub use env::{ContinuousTriangleEnv, DiscretizedEnv, Environment, MovingTriangleEnv, StationaryBernoulliEnv};
pub use error::{BanditError, Result};
pub use graph::UnimodalGraph;
pub use harness::{emit_csv, run_experiment, ResultRow, ResultTable};
pub use kl::{bernoulli_kl, kl_ucb_upper, threshold, ThresholdConfig};
pub use policy::{IndexPolicy, IndexRule, LeaderPolicy, Policy, PolicyKind, UcbConfig, UcbDelta};
pub use stream::RewardStream;
