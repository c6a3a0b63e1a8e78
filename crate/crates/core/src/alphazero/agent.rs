use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::search::guided_search;
use crate::agent::{Agent, AgentError};
use crate::board::{Board, Mark};
use crate::neural::{Network, Real};

/// Plays the most visited column of a noiseless guided search.
pub struct AlphaZeroAgent<F> {
    net: Arc<Network<F>>,
    sims: u32,
    c_puct: f64,
    rng: ChaCha8Rng,
}

impl<F: Real> AlphaZeroAgent<F> {
    pub fn new(net: Arc<Network<F>>, sims: u32, c_puct: f64, seed: u64) -> Self {
        AlphaZeroAgent {
            net,
            sims: sims.max(1),
            c_puct,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<F: Real> Agent for AlphaZeroAgent<F> {
    fn name(&self) -> String {
        format!("alphazero(sims={})", self.sims)
    }

    fn choose(&mut self, board: &Board, mark: Mark, deadline: Instant) -> Result<usize, AgentError> {
        if mark != board.to_move() {
            return Err(AgentError::Failed(format!("asked to move for {mark} but {} is to move", board.to_move())));
        }
        let legal = board.legal_moves();
        if let [only] = legal[..] {
            return Ok(only);
        }
        let result = guided_search(board, &self.net, self.sims, self.c_puct, None, Some(deadline), &mut self.rng)?;
        Ok(result.best_move())
    }
}
