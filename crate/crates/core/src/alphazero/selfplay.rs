use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::encode::{encode_into, legal_mask};
use super::search::{guided_search, visit_policy, DirichletNoise};
use super::train::TrainConfig;
use crate::agent::AgentError;
use crate::board::{Board, Mark, Outcome};
use crate::neural::{Batch, Network, Real, Tensor, ACTIONS, BOARD, INPUT_LEN, IN_PLANES};

/// One self-play position with its search policy and final result.
///
/// The position is kept as a board and encoded on demand, which keeps a full
/// replay buffer small.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample {
    pub board: Board,
    pub pi: [f64; ACTIONS],
    /// Result for the side to move at `board`: +1 win, -1 loss, 0 draw.
    pub z: f64,
    pub mask: [bool; ACTIONS],
}

impl TrainExample {
    pub fn to_move(&self) -> Mark {
        self.board.to_move()
    }

    pub fn encode<F: Real>(&self, out: &mut [F]) {
        encode_into(&self.board, self.board.to_move(), out);
    }
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub examples: Vec<TrainExample>,
    pub outcome: Outcome,
    pub moves: Vec<usize>,
}

/// Stacks examples into a training batch.
pub fn make_batch<F: Real>(examples: &[&TrainExample]) -> Batch<F> {
    let b = examples.len();
    let mut states = vec![F::zero(); b * INPUT_LEN];
    let mut pi = Vec::with_capacity(b * ACTIONS);
    let mut z = Vec::with_capacity(b);
    let mut masks = Vec::with_capacity(b);
    for (i, ex) in examples.iter().enumerate() {
        ex.encode(&mut states[i * INPUT_LEN..(i + 1) * INPUT_LEN]);
        pi.extend(ex.pi.iter().map(|&p| F::from_f64(p)));
        z.push(F::from_f64(ex.z));
        masks.push(ex.mask);
    }
    Batch {
        states: Tensor::from_vec(&[b, BOARD, BOARD, IN_PLANES], states).expect("sized above"),
        pi: Tensor::from_vec(&[b, ACTIONS], pi).expect("sized above"),
        z: Tensor::from_vec(&[b, 1], z).expect("sized above"),
        masks,
    }
}

/// Plays one self-play game with `net`, recording a training example per
/// move. Moves are sampled from the visit distribution at temperature 1 for
/// the first `temperature_plies` plies and played greedily afterwards.
pub fn execute_episode<F: Real, R: Rng>(
    net: &Network<F>,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<Episode, AgentError> {
    let mut board = Board::empty(config.game);
    let mut pending: Vec<(Board, [f64; ACTIONS], [bool; ACTIONS])> = Vec::new();
    let mut moves = Vec::new();
    let noise = DirichletNoise {
        alpha: config.dirichlet_alpha,
        weight: config.dirichlet_weight,
    };
    let outcome = loop {
        let result = guided_search(&board, net, config.num_sims, config.c_puct, Some(noise), None, rng)?;
        let mask = legal_mask(&board);
        let tau = if board.ply() < config.temperature_plies { 1.0 } else { 0.0 };
        let pi = visit_policy(&result.visits, &mask, tau, rng);
        let col = WeightedIndex::new(pi)
            .map_err(|e| AgentError::Failed(e.to_string()))?
            .sample(rng);
        assert!(mask[col] && board.is_legal(col), "sampled illegal column {col}");
        // the training target is the untempered visit distribution at τ = 1
        let target = visit_policy(&result.visits, &mask, 1.0, rng);
        pending.push((board, target, mask));
        board = board.apply_move(col).expect("legal column");
        moves.push(col);
        let outcome = board.outcome(Some(col));
        if outcome.is_over() {
            break outcome;
        }
    };
    let examples = pending
        .into_iter()
        .map(|(b, pi, mask)| {
            let z = match outcome {
                Outcome::Win(m) if m == b.to_move() => 1.0,
                Outcome::Win(_) => -1.0,
                _ => 0.0,
            };
            TrainExample { board: b, pi, z, mask }
        })
        .collect();
    Ok(Episode {
        examples,
        outcome,
        moves,
    })
}
