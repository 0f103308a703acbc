//! Routed candidate-set actors for offline reinforcement learning.
//!
//! A latent-conditioned one-step actor `f(s, z)` samples `K` candidate
//! actions per state during training. Each dataset action is routed to its
//! nearest candidate, and only that winner receives the behavior-cloning
//! pull and the critic-improvement push. A pointwise-correspondence baseline,
//! a Bellman critic ensemble, synthetic multimodal environments and
//! closed-form oracles for the quantizer, tether-bias and coverage results
//! live alongside.

pub mod actor;
pub mod checkpoint;
pub mod critic;
pub mod diagnostics;
pub mod env;
pub mod error;
pub mod nn;
pub mod prior;
pub mod rng;
pub mod theory;
pub mod train;

pub use actor::{act, drol_actor_loss, generate_candidates, pointwise_actor_loss, route, Actor, ActorLossReport, CandidateSet, RoutingAssignment};
pub use critic::{ActionValue, Aggregation, CriticConfig, CriticEnsemble, QuadraticCritic, Which};
pub use env::{generate_dataset, make_grid_nav, make_interval_bandit, EnvSpec, OfflineDataset, Transition};
pub use error::{Error, Result};
pub use nn::{AdamState, Mlp};
pub use prior::BallPrior;
pub use train::{train, ActorMode, MetricsRecord, TrainConfig};
