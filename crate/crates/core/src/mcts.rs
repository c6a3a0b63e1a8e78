//! Upper-confidence-bound tree search with random or shallow-minimax
//! rollouts.
//!
//! Each iteration selects down the tree by UCB, expands one untried move,
//! plays the position out with the rollout policy and backs the result up
//! the selected path. A node's `w` counts results from the point of view of
//! the player whose move created it, draws counting as half a win, so the
//! parent maximizes its own payoff when it picks the child with the highest
//! UCB.

use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentError};
use crate::board::{Board, Mark, Outcome};
use crate::minimax::{self, HeuristicParams};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rollout {
    /// Uniformly random legal moves until the game ends.
    Random,
    /// Each mover plays its depth-limited alpha-beta move.
    Minimax { depth: u32, params: HeuristicParams },
}

impl Rollout {
    pub fn minimax(depth: u32) -> Self {
        Rollout::Minimax {
            depth,
            params: HeuristicParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Exploration constant.
    pub c: f64,
    /// Iteration cap; the deadline passed to `choose` also ends the search.
    pub iterations: u64,
    pub rollout: Rollout,
    pub seed: u64,
}

impl SearchParams {
    /// Plain MCTS: `c = √2`, random rollouts, 20000 iterations.
    pub fn plain(seed: u64) -> Self {
        SearchParams {
            c: std::f64::consts::SQRT_2,
            iterations: 20_000,
            rollout: Rollout::Random,
            seed,
        }
    }

    /// The hybrid: `c = 1/√2`, depth-2 minimax rollouts, 500 iterations.
    pub fn hybrid(seed: u64) -> Self {
        SearchParams {
            c: std::f64::consts::FRAC_1_SQRT_2,
            iterations: 500,
            rollout: Rollout::minimax(2),
            seed,
        }
    }
}

/// `w/n + c·sqrt(ln N / n)`. Only meaningful for `n ≥ 1`.
#[inline]
pub fn ucb(w: f64, n: u32, parent_n: u32, c: f64) -> f64 {
    debug_assert!(n >= 1 && parent_n >= 1);
    let n = n as f64;
    w / n + c * ((parent_n as f64).ln() / n).sqrt()
}

#[derive(Debug, Clone)]
pub struct Node {
    pub w: f64,
    pub n: u32,
    /// Expanded children as (column, node) pairs.
    pub children: Vec<(usize, NodeId)>,
    pub untried: Vec<usize>,
    pub player_just_moved: Mark,
    /// Cached outcome when this position ends the game.
    pub terminal: Option<Outcome>,
    pub parent: Option<NodeId>,
}

impl Node {
    fn new(board: &Board, last_move: Option<usize>, parent: Option<NodeId>) -> Node {
        let outcome = board.outcome(last_move);
        let terminal = outcome.is_over().then_some(outcome);
        Node {
            w: 0.0,
            n: 0,
            children: Vec::new(),
            untried: if terminal.is_some() { Vec::new() } else { board.legal_moves() },
            player_just_moved: board.to_move().opponent(),
            terminal,
            parent,
        }
    }
}

/// A search tree rooted at a fixed position. Nodes live in an arena and
/// refer to each other by index.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    root_board: Board,
}

impl Tree {
    pub const ROOT: NodeId = 0;

    pub fn new(board: Board) -> Tree {
        Tree {
            nodes: vec![Node::new(&board, None, None)],
            root_board: board,
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[Self::ROOT]
    }

    pub fn root_board(&self) -> &Board {
        &self.root_board
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Adds a child of `parent` reached by `col` from `board` (the parent's
    /// position). Returns the child id and position.
    pub fn add_child(&mut self, parent: NodeId, board: &Board, col: usize) -> (NodeId, Board) {
        let next = board.apply_move(col).expect("untried moves are legal");
        let id = self.nodes.len();
        self.nodes.push(Node::new(&next, Some(col), Some(parent)));
        self.nodes[parent].untried.retain(|&c| c != col);
        self.nodes[parent].children.push((col, id));
        (id, next)
    }

    /// Descends by highest UCB from the root until reaching a node with
    /// untried moves or a terminal node. Returns the path and the position at
    /// its last node.
    pub fn select<R: Rng>(&self, c: f64, rng: &mut R) -> (Vec<NodeId>, Board) {
        let mut path = vec![Self::ROOT];
        let mut board = self.root_board;
        let mut id = Self::ROOT;
        let mut ties: Vec<(usize, NodeId)> = Vec::new();
        loop {
            let node = &self.nodes[id];
            if node.terminal.is_some() || !node.untried.is_empty() || node.children.is_empty() {
                return (path, board);
            }
            let mut best = f64::NEG_INFINITY;
            ties.clear();
            for &(col, child) in &node.children {
                let ch = &self.nodes[child];
                let score = ucb(ch.w, ch.n, node.n, c);
                if score > best {
                    best = score;
                    ties.clear();
                    ties.push((col, child));
                } else if score == best {
                    ties.push((col, child));
                }
            }
            let &(col, child) = if ties.len() == 1 {
                &ties[0]
            } else {
                ties.choose(rng).expect("non-empty")
            };
            board = board.apply_move(col).expect("tree moves are legal");
            path.push(child);
            id = child;
        }
    }

    /// Expands a uniformly random untried move of `node`.
    pub fn expand<R: Rng>(&mut self, node: NodeId, board: &Board, rng: &mut R) -> (NodeId, Board) {
        let untried = &self.nodes[node].untried;
        debug_assert!(!untried.is_empty() && self.nodes[node].terminal.is_none());
        let col = untried[rng.random_range(0..untried.len())];
        self.add_child(node, board, col)
    }

    /// Adds one visit and the result's credit to every node on `path`.
    pub fn backpropagate(&mut self, path: &[NodeId], outcome: Outcome) {
        for &id in path {
            let node = &mut self.nodes[id];
            node.n += 1;
            node.w += match outcome {
                Outcome::Win(m) if m == node.player_just_moved => 1.0,
                Outcome::Draw => 0.5,
                _ => 0.0,
            };
        }
    }

    /// One select → expand → simulate → backpropagate round. Returns the
    /// path that was updated.
    pub fn iterate<R: Rng>(&mut self, c: f64, rollout: &Rollout, rng: &mut R) -> Vec<NodeId> {
        let (mut path, board) = self.select(c, rng);
        let leaf = *path.last().expect("path starts at root");
        let outcome = match self.nodes[leaf].terminal {
            Some(outcome) => outcome,
            None => {
                let (child, next) = self.expand(leaf, &board, rng);
                path.push(child);
                match self.nodes[child].terminal {
                    Some(outcome) => outcome,
                    None => simulate(&next, rollout, rng),
                }
            }
        };
        self.backpropagate(&path, outcome);
        path
    }

    /// Root child with the most visits, ties to the lowest column.
    pub fn best_move(&self) -> Option<usize> {
        let mut best: Option<(usize, u32)> = None;
        for &(col, id) in &self.root().children {
            let n = self.nodes[id].n;
            match best {
                Some((bc, bn)) if n < bn || (n == bn && col > bc) => {}
                _ => best = Some((col, n)),
            }
        }
        best.map(|(c, _)| c)
    }

    /// Visit counts of root children, indexed by column.
    pub fn root_visits(&self) -> Vec<u32> {
        let mut visits = vec![0; self.root_board.config().cols()];
        for &(col, id) in &self.root().children {
            visits[col] = self.nodes[id].n;
        }
        visits
    }
}

/// Plays `board` to the end with the rollout policy and returns the result.
pub fn simulate<R: Rng>(board: &Board, rollout: &Rollout, rng: &mut R) -> Outcome {
    let mut board = *board;
    let mut outcome = board.outcome(None);
    let mut moves = [0usize; crate::board::MAX_DIM];
    while !outcome.is_over() {
        let col = match rollout {
            Rollout::Random => {
                let mut k = 0;
                for c in board.legal_iter() {
                    moves[k] = c;
                    k += 1;
                }
                moves[rng.random_range(0..k)]
            }
            Rollout::Minimax { depth, params } => {
                minimax::best_move(&board, *depth, params).expect("ongoing game has moves").0
            }
        };
        board = board.apply_move(col).expect("rollout moves are legal");
        outcome = board.outcome(Some(col));
    }
    outcome
}

/// MCTS player. Builds a fresh tree on every call.
pub struct MctsAgent {
    params: SearchParams,
    rng: ChaCha8Rng,
    last_iterations: u64,
}

impl MctsAgent {
    pub fn new(params: SearchParams) -> Self {
        MctsAgent {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            params,
            last_iterations: 0,
        }
    }

    /// Iterations completed by the last `choose`.
    pub fn last_iterations(&self) -> u64 {
        self.last_iterations
    }

    /// Runs a search from `board` and returns the tree.
    pub fn search(&mut self, board: &Board, deadline: Option<Instant>) -> Tree {
        let mut tree = Tree::new(*board);
        let mut done = 0;
        while done < self.params.iterations {
            if let Some(deadline) = deadline {
                if Instant::now() >= deadline {
                    break;
                }
            }
            tree.iterate(self.params.c, &self.params.rollout, &mut self.rng);
            done += 1;
        }
        self.last_iterations = done;
        tree
    }
}

impl Agent for MctsAgent {
    fn name(&self) -> String {
        let rollout = match self.params.rollout {
            Rollout::Random => "random".to_string(),
            Rollout::Minimax { depth, .. } => format!("minimax{depth}"),
        };
        format!("mcts:c={:.5},iters={},rollout={rollout}", self.params.c, self.params.iterations)
    }

    fn choose(&mut self, board: &Board, _mark: Mark, deadline: Instant) -> Result<usize, AgentError> {
        let legal = board.legal_moves();
        match legal.len() {
            0 => return Err(AgentError::NoLegalMove),
            1 => return Ok(legal[0]),
            _ => {}
        }
        let tree = self.search(board, Some(deadline));
        // with no completed iteration, fall back to the first legal column
        Ok(tree.best_move().unwrap_or(legal[0]))
    }
}
