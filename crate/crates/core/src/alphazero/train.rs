use std::collections::VecDeque;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::search::guided_search;
use super::selfplay::{execute_episode, make_batch, TrainExample};
use crate::agent::AgentError;
use crate::board::{Board, GameConfig, Mark, Outcome};
use crate::neural::{AdamConfig, AdamState, Architecture, Checkpoint, LossParts, Metadata, Network, NeuralError, Real};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("training diverged at iteration {iteration}: non-finite loss")]
    Diverged { iteration: u64 },
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Every knob of self-play training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub game: GameConfig,
    pub num_iters: u64,
    pub num_episodes: u32,
    pub num_sims: u32,
    pub gating_threshold: f64,
    pub gating_games: u32,
    /// Iterations of examples kept in the replay buffer.
    pub replay_capacity: usize,
    /// Plies sampled at temperature 1 before play turns greedy.
    pub temperature_plies: usize,
    pub c_puct: f64,
    pub batch_size: usize,
    pub epochs: u32,
    pub lr: f64,
    pub l2: f64,
    pub dirichlet_alpha: f64,
    pub dirichlet_weight: f64,
    pub architecture: Architecture,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            game: GameConfig::CONNECT_FOUR,
            num_iters: 30,
            num_episodes: 50,
            num_sims: 100,
            gating_threshold: 0.6,
            gating_games: 40,
            replay_capacity: 20,
            temperature_plies: 8,
            c_puct: 1.5,
            batch_size: 64,
            epochs: 5,
            lr: 1e-3,
            l2: 1e-4,
            dirichlet_alpha: 1.0,
            dirichlet_weight: 0.25,
            architecture: Architecture::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::InvalidConfig(msg.into()));
        if !(self.gating_threshold > 0.5 && self.gating_threshold <= 1.0) {
            return bad("gating threshold must be in (0.5, 1]");
        }
        if self.num_iters == 0
            || self.num_episodes == 0
            || self.num_sims == 0
            || self.replay_capacity == 0
            || self.batch_size == 0
            || self.epochs == 0
        {
            return bad("all counts must be positive");
        }
        if self.gating_games < 2 || self.gating_games % 2 != 0 {
            return bad("gating games must be even and at least 2");
        }
        if !(self.c_puct > 0.0 && self.c_puct.is_finite()) {
            return bad("c_puct must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) || !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("learning rate must be positive and l2 non-negative");
        }
        if !(self.dirichlet_alpha > 0.0) || !(0.0..=1.0).contains(&self.dirichlet_weight) {
            return bad("dirichlet alpha must be positive and weight in [0, 1]");
        }
        if self.architecture.filters == 0 || self.architecture.hidden == 0 {
            return bad("architecture sizes must be positive");
        }
        Ok(())
    }
}

/// Examples grouped by the iteration that produced them; the oldest group
/// is dropped once more than `capacity` groups are held.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    groups: VecDeque<Vec<TrainExample>>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer {
            capacity,
            groups: VecDeque::new(),
        }
    }

    pub fn push_iteration(&mut self, examples: Vec<TrainExample>) {
        self.groups.push_back(examples);
        while self.groups.len() > self.capacity {
            self.groups.pop_front();
        }
    }

    pub fn iterations(&self) -> usize {
        self.groups.len()
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &TrainExample> {
        self.groups.iter().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainStats {
    pub steps: u64,
    /// Mean batch loss over the final epoch.
    pub loss: LossParts,
}

/// Trains a copy of `net` on the whole buffer for `config.epochs` shuffled
/// passes. Returns the candidate with its optimizer state.
pub fn train_candidate<F: Real, R: Rng>(
    net: &Network<F>,
    adam: &AdamState<F>,
    buffer: &ReplayBuffer,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<(Network<F>, AdamState<F>, TrainStats), TrainError> {
    let mut cand = net.clone();
    let mut opt = adam.clone();
    opt.config.lr = config.lr;
    let examples: Vec<&TrainExample> = buffer.iter().collect();
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut stats = TrainStats::default();
    let l2 = F::from_f64(config.l2);
    for _ in 0..config.epochs {
        order.shuffle(rng);
        let mut sum = LossParts::default();
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            let picked: Vec<&TrainExample> = chunk.iter().map(|&i| examples[i]).collect();
            let batch = make_batch::<F>(&picked);
            let (parts, grads) = cand.loss_and_gradients(&batch, l2)?;
            if !parts.total().is_finite() {
                return Err(TrainError::Diverged { iteration: 0 });
            }
            opt.step(cand.params_mut(), &grads)?;
            sum.value += parts.value;
            sum.policy += parts.policy;
            sum.l2 += parts.l2;
            batches += 1;
            stats.steps += 1;
        }
        let n = batches.max(1) as f64;
        stats.loss = LossParts {
            value: sum.value / n,
            policy: sum.policy / n,
            l2: sum.l2 / n,
        };
    }
    if !cand.is_finite() {
        return Err(TrainError::Diverged { iteration: 0 });
    }
    Ok((cand, opt, stats))
}

/// One game between two networks searching greedily without noise.
pub fn play_guided_game<F: Real, R: Rng>(
    p1: &Network<F>,
    p2: &Network<F>,
    game: GameConfig,
    sims: u32,
    c_puct: f64,
    rng: &mut R,
) -> Result<Outcome, TrainError> {
    let mut board = Board::empty(game);
    loop {
        let net = if board.to_move() == Mark::P1 { p1 } else { p2 };
        let col = guided_search(&board, net, sims, c_puct, None, None, rng)?.best_move();
        board = board.apply_move(col).map_err(|e| AgentError::Failed(e.to_string()))?;
        let outcome = board.outcome(Some(col));
        if outcome.is_over() {
            return Ok(outcome);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub wins_new: u32,
    pub wins_old: u32,
    pub draws: u32,
    /// `wins_new / (wins_new + wins_old)`, absent when every game was drawn.
    pub fraction: Option<f64>,
    pub promoted: bool,
}

/// Promotion rule over decided games. No decided game means no promotion.
pub fn decide_promotion(wins_new: u32, wins_old: u32, threshold: f64) -> (Option<f64>, bool) {
    let decided = wins_new + wins_old;
    if decided == 0 {
        return (None, false);
    }
    let fraction = wins_new as f64 / decided as f64;
    (Some(fraction), fraction >= threshold)
}

/// Plays `config.gating_games` games, half with `new` moving first.
pub fn gate<F: Real, R: Rng>(
    new: &Network<F>,
    old: &Network<F>,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<GateResult, TrainError> {
    let (mut wins_new, mut wins_old, mut draws) = (0, 0, 0);
    for g in 0..config.gating_games {
        let new_mark = if g % 2 == 0 { Mark::P1 } else { Mark::P2 };
        let (p1, p2) = if new_mark == Mark::P1 { (new, old) } else { (old, new) };
        match play_guided_game(p1, p2, config.game, config.num_sims, config.c_puct, rng)? {
            Outcome::Win(m) if m == new_mark => wins_new += 1,
            Outcome::Win(_) => wins_old += 1,
            _ => draws += 1,
        }
    }
    let (fraction, promoted) = decide_promotion(wins_new, wins_old, config.gating_threshold);
    Ok(GateResult {
        wins_new,
        wins_old,
        draws,
        fraction,
        promoted,
    })
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: u64,
    pub episodes: u32,
    pub examples_added: usize,
    pub buffer_examples: usize,
    pub buffer_iterations: usize,
    pub p1_wins: u32,
    pub p2_wins: u32,
    pub draws: u32,
    pub train: TrainStats,
    pub gate: GateResult,
    pub checkpoint: PathBuf,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrainSummary<F> {
    /// The network self-play ended with, i.e. the last promoted one.
    pub checkpoint: Checkpoint<F>,
    pub best_path: PathBuf,
    pub logs: Vec<IterationLog>,
}

/// Gated self-play policy iteration.
///
/// Each iteration adds `num_episodes` self-play games to the buffer, trains
/// a candidate on the buffer and keeps it only if it passes [`gate`].
/// `out_dir` receives `iter_NNNN.ckpt` per iteration, `best.ckpt` and
/// `training.jsonl`. A non-finite loss stops training with
/// [`TrainError::Diverged`]; checkpoints already written are left intact.
pub fn policy_iteration<F: Real>(config: &TrainConfig, out_dir: &Path) -> Result<TrainSummary<F>, TrainError> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net: Network<F> = Network::new(config.architecture, &mut rng);
    let mut adam = AdamState::new(
        AdamConfig {
            lr: config.lr,
            ..AdamConfig::default()
        },
        net.params(),
    );
    let mut metadata = Metadata {
        iteration: 0,
        lineage: vec![0],
        game: Some(config.game),
    };
    let best_path = out_dir.join("best.ckpt");
    let save = |net: &Network<F>, adam: &AdamState<F>, meta: &Metadata, path: &Path| {
        Checkpoint {
            network: net.clone(),
            adam: adam.clone(),
            metadata: meta.clone(),
        }
        .save(path)
    };
    save(&net, &adam, &metadata, &out_dir.join("iter_0000.ckpt"))?;
    save(&net, &adam, &metadata, &best_path)?;

    let mut log_file = BufWriter::new(File::create(out_dir.join("training.jsonl"))?);
    let mut buffer = ReplayBuffer::new(config.replay_capacity);
    let mut logs = Vec::new();
    for iteration in 1..=config.num_iters {
        let started = Instant::now();
        let mut added = Vec::new();
        let (mut p1_wins, mut p2_wins, mut draws) = (0, 0, 0);
        for _ in 0..config.num_episodes {
            let ep = execute_episode(&net, config, &mut rng)?;
            match ep.outcome {
                Outcome::Win(Mark::P1) => p1_wins += 1,
                Outcome::Win(Mark::P2) => p2_wins += 1,
                _ => draws += 1,
            }
            added.extend(ep.examples);
        }
        let examples_added = added.len();
        buffer.push_iteration(added);

        let (cand, cand_adam, train) = match train_candidate(&net, &adam, &buffer, config, &mut rng) {
            Err(TrainError::Diverged { .. }) => {
                log::error!("iteration {iteration}: non-finite loss, stopping");
                return Err(TrainError::Diverged { iteration });
            }
            other => other?,
        };
        let gate_result = gate(&cand, &net, config, &mut rng)?;
        if gate_result.promoted {
            net = cand;
            adam = cand_adam;
            metadata.lineage.push(iteration);
        }
        metadata.iteration = iteration;
        let path = out_dir.join(format!("iter_{iteration:04}.ckpt"));
        save(&net, &adam, &metadata, &path)?;
        save(&net, &adam, &metadata, &best_path)?;

        let record = IterationLog {
            iteration,
            episodes: config.num_episodes,
            examples_added,
            buffer_examples: buffer.len(),
            buffer_iterations: buffer.iterations(),
            p1_wins,
            p2_wins,
            draws,
            train,
            gate: gate_result,
            checkpoint: path,
            seconds: started.elapsed().as_secs_f64(),
        };
        log::info!(
            "iteration {iteration}: loss {:.4} (v {:.4}, p {:.4}), gate {}-{}-{} {}",
            train.loss.total(),
            train.loss.value,
            train.loss.policy,
            gate_result.wins_new,
            gate_result.wins_old,
            gate_result.draws,
            if gate_result.promoted { "promoted" } else { "rejected" }
        );
        serde_json::to_writer(&mut log_file, &record)?;
        writeln!(log_file)?;
        log_file.flush()?;
        logs.push(record);
    }
    Ok(TrainSummary {
        checkpoint: Checkpoint {
            network: net,
            adam,
            metadata,
        },
        best_path,
        logs,
    })
}
