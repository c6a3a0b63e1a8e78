//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

use connectx::minimax::HeuristicParams;
use connectx::{Board, GameConfig, Mark, Outcome};
use rand::seq::IndexedRandom;
use rand::Rng;

pub mod grad;
pub mod invariants;

/// Row-major grid, row 0 at the top.
pub fn grid(board: &Board) -> Vec<Vec<Option<Mark>>> {
    let cfg = board.config();
    (0..cfg.rows())
        .map(|r| (0..cfg.cols()).map(|c| board.cell(r, c)).collect())
        .collect()
}

const DIRS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

fn at(g: &[Vec<Option<Mark>>], r: isize, c: isize) -> Option<Mark> {
    if r < 0 || c < 0 || r as usize >= g.len() || c as usize >= g[0].len() {
        return None;
    }
    g[r as usize][c as usize]
}

/// Lengths of every maximal run of `mark`, in every direction.
pub fn runs(g: &[Vec<Option<Mark>>], mark: Mark) -> Vec<usize> {
    let mut out = Vec::new();
    for r in 0..g.len() as isize {
        for c in 0..g[0].len() as isize {
            for (dr, dc) in DIRS {
                if at(g, r, c) != Some(mark) || at(g, r - dr, c - dc) == Some(mark) {
                    continue;
                }
                let mut len = 0;
                while at(g, r + len * dr, c + len * dc) == Some(mark) {
                    len += 1;
                }
                out.push(len as usize);
            }
        }
    }
    out
}

/// Outcome by scanning the whole grid.
pub fn naive_outcome(board: &Board) -> Outcome {
    let g = grid(board);
    let x = board.config().inarow();
    for m in [Mark::P1, Mark::P2] {
        if runs(&g, m).iter().any(|&l| l >= x) {
            return Outcome::Win(m);
        }
    }
    if g.iter().flatten().all(Option::is_some) {
        Outcome::Draw
    } else {
        Outcome::Ongoing
    }
}

pub fn naive_heuristic(board: &Board, mark: Mark, params: &HeuristicParams) -> f64 {
    let g = grid(board);
    let x = board.config().inarow();
    let score = |m: Mark, base: f64| -> f64 {
        runs(&g, m)
            .into_iter()
            .filter(|&l| l >= 2)
            .map(|l| base.powi(l.min(x) as i32 - 1))
            .sum()
    };
    score(mark, params.own_base) - score(mark.opponent(), params.opp_base)
}

pub fn naive_leaf(board: &Board, outcome: Outcome, mark: Mark, depth: u32, params: &HeuristicParams) -> f64 {
    let cfg = board.config();
    let big = 10.0 * params.own_base.max(params.opp_base).powi(cfg.inarow() as i32 - 1) * cfg.cells() as f64;
    match outcome {
        Outcome::Win(m) if m == mark => big * (depth as f64 + 1.0),
        Outcome::Win(_) => -big * (depth as f64 + 1.0),
        _ => naive_heuristic(board, mark, params),
    }
}

/// Unpruned depth-limited minimax.
pub fn plain_minimax(board: &Board, mark: Mark, depth: u32, params: &HeuristicParams) -> f64 {
    let outcome = naive_outcome(board);
    if depth == 0 || outcome.is_over() {
        return naive_leaf(board, outcome, mark, depth, params);
    }
    let values = (0..board.config().cols())
        .filter(|&c| board.is_legal(c))
        .map(|c| plain_minimax(&board.apply_move(c).unwrap(), mark, depth - 1, params));
    if board.to_move() == mark {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    }
}

/// Unmemoized negamax: game value for the side to move.
pub fn plain_negamax(board: &Board) -> i8 {
    match naive_outcome(board) {
        Outcome::Win(m) => return if m == board.to_move() { 1 } else { -1 },
        Outcome::Draw => return 0,
        Outcome::Ongoing => {}
    }
    let mut best = -1;
    for c in 0..board.config().cols() {
        if board.is_legal(c) {
            best = best.max(-plain_negamax(&board.apply_move(c).unwrap()));
            if best == 1 {
                break;
            }
        }
    }
    best
}

/// A position reached by uniformly random play, stopping before the game
/// ends. The number of plies is drawn uniformly from `0..=max_plies`.
pub fn random_position<R: Rng>(config: GameConfig, max_plies: usize, rng: &mut R) -> Board {
    loop {
        let target = rng.random_range(0..=max_plies);
        let mut board = Board::empty(config);
        let mut ok = true;
        for _ in 0..target {
            let col = *board.legal_moves().choose(rng).unwrap();
            board = board.apply_move(col).unwrap();
            if board.outcome(Some(col)).is_over() {
                ok = false;
                break;
            }
        }
        if ok {
            return board;
        }
    }
}

/// Plays a uniformly random game, returning every board and the moves.
pub fn random_game<R: Rng>(config: GameConfig, rng: &mut R) -> (Vec<Board>, Vec<usize>) {
    let mut board = Board::empty(config);
    let mut boards = vec![board];
    let mut moves = Vec::new();
    loop {
        let Some(&col) = board.legal_moves().choose(rng) else { break };
        board = board.apply_move(col).unwrap();
        boards.push(board);
        moves.push(col);
        if board.outcome(Some(col)).is_over() {
            break;
        }
    }
    (boards, moves)
}
