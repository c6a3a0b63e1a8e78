//! ConnectX: connect-`X` on an `M × N` gravity board.
//!
//! The crate provides the rules engine, five playing agents (greedy, plain
//! MCTS, alpha-beta minimax, an MCTS variant with minimax rollouts and an
//! AlphaZero-style network-guided search), the from-scratch network and
//! training loop behind the latter, and a tournament harness.

pub mod agent;
pub mod alphazero;
pub mod arena;
pub mod board;
pub mod mcts;
pub mod minimax;
pub mod neural;

pub use agent::{Agent, AgentError, GreedyAgent, RandomAgent};
pub use alphazero::{AlphaZeroAgent, TrainConfig};
pub use arena::{AgentSpec, MatchRecord, TimeControl};
pub use board::{Board, GameConfig, GameError, Mark, Outcome, MAX_DIM};
pub use mcts::{MctsAgent, Rollout, SearchParams};
pub use minimax::{HeuristicParams, MinimaxAgent, MinimaxConfig, Solver};
