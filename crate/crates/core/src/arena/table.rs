use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

use super::play::{derive_seed, play_agents, MatchRecord, MatchResult, TimeControl};
use super::rating::{update_ratings, RatingConfig};
use super::spec::{AgentSpec, SpecError};
use crate::board::GameConfig;

/// One scheduled game between agents `p1` and `p2` (indices into the spec
/// list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub p1: usize,
    pub p2: usize,
    pub seed: u64,
}

/// Every unordered pair `i < j` plays `games_per_pair` games, alternating
/// who moves first, starting with `i`.
pub fn schedule(agents: usize, games_per_pair: usize, seed: u64) -> Vec<Pairing> {
    let mut out = Vec::new();
    for i in 0..agents {
        for j in i + 1..agents {
            for g in 0..games_per_pair {
                let (p1, p2) = if g % 2 == 0 { (i, j) } else { (j, i) };
                out.push(Pairing {
                    p1,
                    p2,
                    seed: derive_seed(seed, out.len() as u64 + 1),
                });
            }
        }
    }
    out
}

/// `(column wins, row wins, draws)` for row `i` against column `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cell {
    pub col_wins: u32,
    pub row_wins: u32,
    pub draws: u32,
}

impl Cell {
    pub fn total(&self) -> u32 {
        self.col_wins + self.row_wins + self.draws
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPlayTable {
    pub names: Vec<String>,
    pub games_per_pair: usize,
    /// `wins[i][j]`: games agent `i` won against agent `j`.
    wins: Vec<Vec<u32>>,
    draws: Vec<Vec<u32>>,
}

impl CrossPlayTable {
    pub fn new(names: Vec<String>, games_per_pair: usize) -> Self {
        let n = names.len();
        CrossPlayTable {
            names,
            games_per_pair,
            wins: vec![vec![0; n]; n],
            draws: vec![vec![0; n]; n],
        }
    }

    pub fn record(&mut self, p1: usize, p2: usize, result: MatchResult) {
        match result {
            MatchResult::P1Win => self.wins[p1][p2] += 1,
            MatchResult::P2Win => self.wins[p2][p1] += 1,
            MatchResult::Draw => {
                self.draws[p1][p2] += 1;
                self.draws[p2][p1] += 1;
            }
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        Cell {
            col_wins: self.wins[col][row],
            row_wins: self.wins[row][col],
            draws: self.draws[row][col],
        }
    }

    /// Upper-triangle text table; each cell reads `col wins / row wins / draws`.
    pub fn render(&self) -> String {
        let n = self.names.len();
        let cells: Vec<Vec<String>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j <= i {
                            "-".to_string()
                        } else {
                            let c = self.cell(i, j);
                            format!("{} / {} / {}", c.col_wins, c.row_wins, c.draws)
                        }
                    })
                    .collect()
            })
            .collect();
        let first = self.names.iter().map(String::len).max().unwrap_or(0).max("Algorithms".len());
        let widths: Vec<usize> = (0..n)
            .map(|j| (0..n).map(|i| cells[i][j].len()).max().unwrap_or(1).max(self.names[j].len()))
            .collect();
        let mut out = String::new();
        let _ = write!(out, "{:<first$}", "Algorithms");
        for (j, name) in self.names.iter().enumerate() {
            let _ = write!(out, " | {:<w$}", name, w = widths[j]);
        }
        out.push('\n');
        let rule = first + widths.iter().map(|w| w + 3).sum::<usize>();
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        for i in 0..n {
            let _ = write!(out, "{:<first$}", self.names[i]);
            for j in 0..n {
                let _ = write!(out, " | {:<w$}", cells[i][j], w = widths[j]);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tournament {
    pub table: CrossPlayTable,
    pub pairings: Vec<Pairing>,
    /// One record per pairing, in schedule order.
    pub records: Vec<MatchRecord>,
}

impl Tournament {
    /// Elo ratings from the games in schedule order.
    pub fn ratings(&self, config: &RatingConfig) -> Vec<f64> {
        let games = self.pairings.iter().zip(&self.records).map(|(p, r)| {
            let score = match r.result {
                MatchResult::P1Win => 1.0,
                MatchResult::P2Win => 0.0,
                MatchResult::Draw => 0.5,
            };
            (p.p1, p.p2, score)
        });
        update_ratings(self.table.names.len(), games, config)
    }
}

/// Short display labels; repeated agent names get a `#k` suffix.
pub fn labels(specs: &[AgentSpec]) -> Vec<String> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dupes = specs.iter().filter(|t| t.name() == s.name()).count();
            if dupes > 1 {
                let k = specs[..i].iter().filter(|t| t.name() == s.name()).count() + 1;
                format!("{}#{k}", s.name())
            } else {
                s.name().to_string()
            }
        })
        .collect()
}

/// Round-robin cross-play. Matches run on up to `workers` threads, but each
/// match has its own derived seed and results are collected in schedule
/// order, so the outcome does not depend on completion order.
pub fn round_robin(
    specs: &[AgentSpec],
    games_per_pair: usize,
    config: GameConfig,
    time: TimeControl,
    seed: u64,
    workers: usize,
) -> Result<Tournament, SpecError> {
    round_robin_with(specs, games_per_pair, config, time, seed, workers, &|_, _| {})
}

/// [`round_robin`], calling `on_record` as each match finishes (in
/// completion order, from worker threads).
pub fn round_robin_with(
    specs: &[AgentSpec],
    games_per_pair: usize,
    config: GameConfig,
    time: TimeControl,
    seed: u64,
    workers: usize,
    on_record: &(dyn Fn(&Pairing, &MatchRecord) + Sync),
) -> Result<Tournament, SpecError> {
    // fail on a bad spec before any game starts
    for spec in specs {
        spec.build(0)?;
    }
    let names = labels(specs);
    let pairings = schedule(specs.len(), games_per_pair, seed);
    let slots: Mutex<Vec<Option<Result<MatchRecord, SpecError>>>> =
        Mutex::new((0..pairings.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers.max(1).min(pairings.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(p) = pairings.get(k) else { break };
                let result = (|| {
                    let a = specs[p.p1].build(derive_seed(p.seed, 1))?;
                    let b = specs[p.p2].build(derive_seed(p.seed, 2))?;
                    Ok(play_agents(
                        a,
                        b,
                        names[p.p1].clone(),
                        names[p.p2].clone(),
                        config,
                        time,
                        p.seed,
                    ))
                })();
                if let Ok(record) = &result {
                    on_record(p, record);
                }
                slots.lock().expect("slot lock")[k] = Some(result);
            });
        }
    });
    let mut table = CrossPlayTable::new(names, games_per_pair);
    let mut records = Vec::with_capacity(pairings.len());
    for (p, slot) in pairings.iter().zip(slots.into_inner().expect("slot lock")) {
        let record = slot.expect("every pairing played")?;
        table.record(p.p1, p.p2, record.result);
        records.push(record);
    }
    Ok(Tournament {
        table,
        pairings,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_alternates_first_mover() {
        let s = schedule(3, 4, 7);
        assert_eq!(s.len(), 12);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let firsts = |x| s.iter().filter(|p| p.p1 == x && p.p2 == if x == a { b } else { a }).count();
            assert_eq!(firsts(a), 2);
            assert_eq!(firsts(b), 2);
        }
        assert_eq!(s, schedule(3, 4, 7));
        assert_ne!(s[0].seed, s[1].seed);
    }

    #[test]
    fn cells_follow_row_column_convention() {
        let mut t = CrossPlayTable::new(vec!["greedy".into(), "mcts".into()], 4);
        t.record(0, 1, MatchResult::P2Win);
        t.record(1, 0, MatchResult::P1Win);
        t.record(0, 1, MatchResult::Draw);
        t.record(1, 0, MatchResult::P2Win);
        let c = t.cell(0, 1);
        assert_eq!((c.col_wins, c.row_wins, c.draws), (2, 1, 1));
        assert_eq!(c.total(), 4);
        let text = t.render();
        assert!(text.contains("2 / 1 / 1"), "{text}");
        assert!(text.starts_with("Algorithms"));
    }

    #[test]
    fn duplicate_labels() {
        let specs = [AgentSpec::Greedy, AgentSpec::Random, AgentSpec::Greedy];
        assert_eq!(labels(&specs), vec!["greedy#1", "random", "greedy#2"]);
    }
}
