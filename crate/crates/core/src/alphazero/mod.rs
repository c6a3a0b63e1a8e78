//! Network-guided search and self-play policy iteration.
//!
//! Positions are encoded into a fixed 12×12×3 input so one network serves
//! every board size. Search uses prior-weighted UCB (PUCT) with leaf values
//! from the network, self-play records `(state, π, z)` triples, and each
//! trained candidate must win at least 60% of the decided gating games
//! against the incumbent before it replaces it.

mod agent;
mod encode;
mod search;
mod selfplay;
mod train;

pub use agent::AlphaZeroAgent;
pub use encode::{encode_into, encode_state, legal_mask};
pub use search::{guided_search, visit_policy, DirichletNoise, SearchResult};
pub use selfplay::{execute_episode, make_batch, Episode, TrainExample};
pub use train::{
    decide_promotion, gate, play_guided_game, policy_iteration, train_candidate, GateResult, IterationLog,
    ReplayBuffer, TrainConfig, TrainError, TrainStats, TrainSummary,
};
