//! The player interface shared by every agent, plus the two baselines.

use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::board::{Board, Mark};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no legal move available")]
    NoLegalMove,
    #[error("agent failure: {0}")]
    Failed(String),
}

/// A ConnectX player: given a position and the mark to play, pick a column.
///
/// Implementations must return a legal column whenever one exists and should
/// return before `deadline`. Stochastic agents draw from a generator seeded at
/// construction, so the same seed and inputs reproduce the same moves.
pub trait Agent: Send {
    fn name(&self) -> String;

    fn choose(&mut self, board: &Board, mark: Mark, deadline: Instant) -> Result<usize, AgentError>;
}

impl Agent for Box<dyn Agent> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn choose(&mut self, board: &Board, mark: Mark, deadline: Instant) -> Result<usize, AgentError> {
        (**self).choose(board, mark, deadline)
    }
}

/// Uniformly random legal moves.
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        RandomAgent {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> String {
        "random".into()
    }

    fn choose(&mut self, board: &Board, _mark: Mark, _deadline: Instant) -> Result<usize, AgentError> {
        board
            .legal_moves()
            .choose(&mut self.rng)
            .copied()
            .ok_or(AgentError::NoLegalMove)
    }
}

/// One-step lookahead: play a column that immediately connects `inarow`,
/// otherwise the lowest open column. It never blocks the opponent.
#[derive(Debug, Default, Clone, Copy)]
pub struct GreedyAgent;

impl GreedyAgent {
    /// Value of each column: `+inf` for an immediate win, `0` for other open
    /// columns and `-inf` for full ones.
    pub fn column_values(board: &Board, mark: Mark) -> Vec<f64> {
        (0..board.config().cols())
            .map(|c| {
                if !board.is_legal(c) {
                    f64::NEG_INFINITY
                } else if board.wins_with(mark, c) {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .collect()
    }
}

impl Agent for GreedyAgent {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn choose(&mut self, board: &Board, mark: Mark, _deadline: Instant) -> Result<usize, AgentError> {
        let values = GreedyAgent::column_values(board, mark);
        let mut best: Option<usize> = None;
        for (col, &v) in values.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            if best.is_none_or(|b| v > values[b]) {
                best = Some(col);
            }
        }
        best.ok_or(AgentError::NoLegalMove)
    }
}
