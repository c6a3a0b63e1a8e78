//! Depth-limited alpha-beta search over a run-counting heuristic, and an
//! exhaustive negamax solver used as a ground-truth oracle on tiny boards.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{Agent, AgentError};
use crate::board::{Board, Mark, Outcome, DIRECTIONS};

/// Bases of the heuristic: a run of `i` own tokens is worth `own_base^(i-1)`,
/// a run of `i` opponent tokens costs `opp_base^(i-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    pub own_base: f64,
    pub opp_base: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            own_base: 1000.0,
            opp_base: 2000.0,
        }
    }
}

impl HeuristicParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.own_base > 1.0 && self.opp_base > 1.0 {
            Ok(())
        } else {
            Err(format!(
                "heuristic bases must exceed 1 (own={}, opp={})",
                self.own_base, self.opp_base
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxConfig {
    pub depth: u32,
    pub params: HeuristicParams,
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        MinimaxConfig {
            depth: 5,
            params: HeuristicParams::default(),
        }
    }
}

/// Counts of maximal runs, indexed by run length. Index `i` holds the number
/// of runs of length `i` (runs of `inarow` or longer land in the last
/// bucket); indices 0 and 1 are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunCounts(Vec<u32>);

impl RunCounts {
    pub fn get(&self, len: usize) -> u32 {
        self.0.get(len).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Counts every maximal run of `mark` tokens of length at least 2 along all
/// horizontal, vertical and diagonal lines.
pub fn count_runs(board: &Board, mark: Mark) -> RunCounts {
    let cfg = board.config();
    let x = cfg.inarow();
    let (cols, rows) = (cfg.cols() as isize, cfg.rows() as isize);
    let mut counts = vec![0u32; x + 1];
    let owns = |c: isize, h: isize| {
        c >= 0 && h >= 0 && c < cols && h < rows && board.at(c as usize, h as usize) == Some(mark)
    };
    for col in 0..cols {
        for h in 0..board.height(col as usize) as isize {
            if !owns(col, h) {
                continue;
            }
            for &(dc, dh) in &DIRECTIONS {
                if owns(col - dc, h - dh) {
                    continue;
                }
                let mut len = 1;
                while owns(col + len as isize * dc, h + len as isize * dh) {
                    len += 1;
                }
                if len >= 2 {
                    counts[len.min(x)] += 1;
                }
            }
        }
    }
    RunCounts(counts)
}

fn weighted(counts: &RunCounts, base: f64) -> f64 {
    counts
        .as_slice()
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, &n)| base.powi(i as i32 - 1) * n as f64)
        .sum()
}

/// Positional score of `board` from `mark`'s point of view.
pub fn heuristic(board: &Board, mark: Mark, params: &HeuristicParams) -> f64 {
    weighted(&count_runs(board, mark), params.own_base)
        - weighted(&count_runs(board, mark.opponent()), params.opp_base)
}

/// Magnitude of a decided game, before scaling by remaining depth. Larger
/// than any heuristic value reachable on an undecided board.
pub fn terminal_base(board: &Board, params: &HeuristicParams) -> f64 {
    let cfg = board.config();
    let base = params.own_base.max(params.opp_base);
    10.0 * base.powi(cfg.inarow() as i32 - 1) * cfg.cells() as f64
}

/// Leaf value: wins and losses map to `±terminal_base·(depth+1)` so quicker
/// wins and slower losses are preferred; anything else is the heuristic.
pub fn leaf_value(board: &Board, outcome: Outcome, mark: Mark, depth: u32, params: &HeuristicParams) -> f64 {
    match outcome {
        Outcome::Win(m) => {
            let v = terminal_base(board, params) * (depth as f64 + 1.0);
            if m == mark {
                v
            } else {
                -v
            }
        }
        _ => heuristic(board, mark, params),
    }
}

/// Search state: an optional deadline and the flag raised once it passes.
struct Search<'a> {
    mark: Mark,
    params: &'a HeuristicParams,
    deadline: Option<Instant>,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    fn run(&mut self, board: &Board, last: Option<usize>, depth: u32, mut alpha: f64, mut beta: f64, maximizing: bool) -> f64 {
        self.nodes += 1;
        if let Some(deadline) = self.deadline {
            if self.nodes % 1024 == 0 && Instant::now() >= deadline {
                self.aborted = true;
            }
        }
        if self.aborted {
            return 0.0;
        }
        let outcome = board.outcome(last);
        if depth == 0 || outcome.is_over() {
            return leaf_value(board, outcome, self.mark, depth, self.params);
        }
        if maximizing {
            let mut value = f64::NEG_INFINITY;
            for col in board.legal_iter() {
                let child = board.apply_move(col).expect("legal move");
                value = value.max(self.run(&child, Some(col), depth - 1, alpha, beta, false));
                if value >= beta {
                    break;
                }
                alpha = alpha.max(value);
            }
            value
        } else {
            let mut value = f64::INFINITY;
            for col in board.legal_iter() {
                let child = board.apply_move(col).expect("legal move");
                value = value.min(self.run(&child, Some(col), depth - 1, alpha, beta, true));
                if value <= alpha {
                    break;
                }
                beta = beta.min(value);
            }
            value
        }
    }
}

/// Fail-soft alpha-beta value of `board` for `mark`. `maximizing` says
/// whether the side to move at `board` is `mark`.
pub fn alphabeta(
    board: &Board,
    mark: Mark,
    depth: u32,
    alpha: f64,
    beta: f64,
    maximizing: bool,
    params: &HeuristicParams,
) -> f64 {
    let mut search = Search {
        mark,
        params,
        deadline: None,
        nodes: 0,
        aborted: false,
    };
    search.run(board, None, depth, alpha, beta, maximizing)
}

fn root_search(board: &Board, mark: Mark, depth: u32, params: &HeuristicParams, deadline: Option<Instant>) -> Option<(usize, f64)> {
    let mut search = Search {
        mark,
        params,
        deadline,
        nodes: 0,
        aborted: false,
    };
    let mut best: Option<(usize, f64)> = None;
    for col in board.legal_iter() {
        let child = board.apply_move(col).expect("legal move");
        // Passing the best value so far as alpha leaves every child that could
        // beat it with its exact value, so the choice matches a full-window scan.
        let alpha = best.map_or(f64::NEG_INFINITY, |(_, v)| v);
        let value = search.run(&child, Some(col), depth - 1, alpha, f64::INFINITY, false);
        if search.aborted {
            return None;
        }
        if best.is_none_or(|(_, v)| value > v) {
            best = Some((col, value));
        }
    }
    best
}

/// Best column for the side to move at a fixed depth (ties to the lowest
/// column), with its value.
pub fn best_move(board: &Board, depth: u32, params: &HeuristicParams) -> Option<(usize, f64)> {
    root_search(board, board.to_move(), depth.max(1), params, None)
}

/// Alpha-beta player with iterative deepening up to `config.depth`.
pub struct MinimaxAgent {
    config: MinimaxConfig,
    last_depth: u32,
}

impl MinimaxAgent {
    pub fn new(config: MinimaxConfig) -> Self {
        MinimaxAgent { config, last_depth: 0 }
    }

    /// Depth of the deepest iteration completed by the last `choose`.
    pub fn last_depth(&self) -> u32 {
        self.last_depth
    }
}

impl Agent for MinimaxAgent {
    fn name(&self) -> String {
        format!("minimax:depth={}", self.config.depth)
    }

    fn choose(&mut self, board: &Board, mark: Mark, deadline: Instant) -> Result<usize, AgentError> {
        let first = board.legal_iter().next().ok_or(AgentError::NoLegalMove)?;
        let mut chosen = first;
        self.last_depth = 0;
        for depth in 1..=self.config.depth.max(1) {
            // depth 1 always completes so there is a searched move to fall back on
            let limit = if depth == 1 { None } else { Some(deadline) };
            match root_search(board, mark, depth, &self.config.params, limit) {
                Some((col, _)) => {
                    chosen = col;
                    self.last_depth = depth;
                }
                None => break,
            }
            if Instant::now() >= deadline || depth as usize >= board.config().cells() - board.ply() {
                break;
            }
        }
        Ok(chosen)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("board has {cells} cells, solver cap is {cap}")]
    BoardTooLarge { cells: usize, cap: usize },
}

/// Exact game value by memoized negamax over the full tree.
pub struct Solver {
    cap: usize,
    memo: HashMap<u64, i8>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::with_cap(16)
    }
}

impl Solver {
    pub fn with_cap(cap: usize) -> Self {
        Solver {
            cap,
            memo: HashMap::new(),
        }
    }

    /// `+1` if `mark` wins with perfect play, `0` for a draw, `-1` for a loss.
    pub fn solve(&mut self, board: &Board, mark: Mark) -> Result<i8, SolveError> {
        let cells = board.config().cells();
        if cells > self.cap {
            return Err(SolveError::BoardTooLarge { cells, cap: self.cap });
        }
        let v = self.negamax(board, board.outcome(None));
        Ok(if mark == board.to_move() { v } else { -v })
    }

    pub fn positions(&self) -> usize {
        self.memo.len()
    }

    // value for the side to move
    fn negamax(&mut self, board: &Board, outcome: Outcome) -> i8 {
        match outcome {
            Outcome::Win(m) => return if m == board.to_move() { 1 } else { -1 },
            Outcome::Draw => return 0,
            Outcome::Ongoing => {}
        }
        let key = board.position_hash();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = -1;
        for col in board.legal_iter() {
            let child = board.apply_move(col).expect("legal move");
            let v = -self.negamax(&child, child.outcome(Some(col)));
            best = best.max(v);
            if best == 1 {
                break;
            }
        }
        self.memo.insert(key, best);
        best
    }
}

/// Convenience wrapper around a fresh [`Solver`] with the default cap.
pub fn solve_exhaustive(board: &Board, mark: Mark) -> Result<i8, SolveError> {
    Solver::default().solve(board, mark)
}
