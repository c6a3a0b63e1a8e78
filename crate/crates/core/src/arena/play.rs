use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::spec::{AgentSpec, SpecError};
use crate::agent::{Agent, AgentError};
use crate::board::{Board, GameConfig, GameError, Mark, Outcome};

/// Per-move thinking time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeControl {
    pub per_move: Duration,
}

impl TimeControl {
    pub fn per_move(per_move: Duration) -> Self {
        TimeControl { per_move }
    }

    /// The deadline handed to agents leaves a little slack before the hard
    /// limit so a well-behaved search can return in time.
    pub fn agent_budget(&self) -> Duration {
        let slack = (self.per_move / 10).min(Duration::from_millis(100));
        self.per_move - slack
    }
}

impl Default for TimeControl {
    fn default() -> Self {
        TimeControl::per_move(Duration::from_secs(5))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchResult {
    P1Win,
    P2Win,
    Draw,
}

impl MatchResult {
    pub fn winner(self) -> Option<Mark> {
        match self {
            MatchResult::P1Win => Some(Mark::P1),
            MatchResult::P2Win => Some(Mark::P2),
            MatchResult::Draw => None,
        }
    }

    fn win_for(mark: Mark) -> Self {
        match mark {
            Mark::P1 => MatchResult::P1Win,
            Mark::P2 => MatchResult::P2Win,
        }
    }
}

/// Why the game ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossCause {
    Connected,
    IllegalMove,
    Timeout,
    /// Nobody lost: the board filled up.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub config: GameConfig,
    pub p1: String,
    pub p2: String,
    /// Legal moves actually played.
    pub moves: Vec<usize>,
    pub result: MatchResult,
    pub cause: LossCause,
    /// Wall time of every `choose` call, including a failing last one.
    pub think_ms: Vec<f64>,
    pub seed: u64,
    /// What went wrong on an illegal move or timeout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl MatchRecord {
    /// Final outcome of replaying the move list from the empty board.
    pub fn replay(&self) -> Result<Outcome, GameError> {
        let mut board = Board::empty(self.config);
        let mut outcome = Outcome::Ongoing;
        for (i, &col) in self.moves.iter().enumerate() {
            if outcome.is_over() {
                return Err(GameError::Parse {
                    line: i,
                    reason: "moves continue after the game ended".into(),
                });
            }
            board = board.apply_move(col)?;
            outcome = board.outcome(Some(col));
        }
        Ok(outcome)
    }

    /// True when a replay reproduces the recorded result. Forfeits replay to
    /// an unfinished game by construction.
    pub fn replays_consistently(&self) -> bool {
        match (self.cause, self.replay()) {
            (LossCause::Connected, Ok(Outcome::Win(m))) => self.result.winner() == Some(m),
            (LossCause::None, Ok(Outcome::Draw)) => self.result == MatchResult::Draw,
            (LossCause::IllegalMove | LossCause::Timeout, Ok(Outcome::Ongoing)) => {
                // the forfeiting side is the one to move after the last legal move
                let loser = if self.moves.len() % 2 == 0 { Mark::P1 } else { Mark::P2 };
                self.result.winner() == Some(loser.opponent())
            }
            _ => false,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

type Request = (Board, Mark, Instant);

/// An agent running on its own thread, so a stuck `choose` can be abandoned.
struct Seat {
    requests: Sender<Request>,
    replies: Receiver<Result<usize, AgentError>>,
}

impl Seat {
    fn spawn(mut agent: Box<dyn Agent>) -> Seat {
        let (req_tx, req_rx) = mpsc::channel::<Request>();
        let (rep_tx, rep_rx) = mpsc::channel();
        thread::spawn(move || {
            for (board, mark, deadline) in req_rx {
                let reply = agent.choose(&board, mark, deadline);
                if rep_tx.send(reply).is_err() {
                    break;
                }
            }
        });
        Seat {
            requests: req_tx,
            replies: rep_rx,
        }
    }
}

/// Derives an independent seed for one consumer of a match seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Plays one game between already built agents. Timeouts, illegal columns,
/// agent errors and panics all forfeit the game for the side at fault.
pub fn play_agents(
    p1: Box<dyn Agent>,
    p2: Box<dyn Agent>,
    p1_name: String,
    p2_name: String,
    config: GameConfig,
    time: TimeControl,
    seed: u64,
) -> MatchRecord {
    let seats = [Seat::spawn(p1), Seat::spawn(p2)];
    let mut board = Board::empty(config);
    let mut record = MatchRecord {
        config,
        p1: p1_name,
        p2: p2_name,
        moves: Vec::new(),
        result: MatchResult::Draw,
        cause: LossCause::None,
        think_ms: Vec::new(),
        seed,
        detail: None,
    };
    loop {
        let mark = board.to_move();
        let seat = &seats[mark.index()];
        let start = Instant::now();
        let reply = match seat.requests.send((board, mark, start + time.agent_budget())) {
            Ok(()) => seat.replies.recv_timeout(time.per_move),
            Err(_) => Err(RecvTimeoutError::Disconnected),
        };
        record.think_ms.push(start.elapsed().as_secs_f64() * 1e3);
        let forfeit = |record: &mut MatchRecord, cause, detail: String| {
            record.result = MatchResult::win_for(mark.opponent());
            record.cause = cause;
            record.detail = Some(detail);
        };
        let col = match reply {
            Ok(Ok(col)) if board.is_legal(col) => col,
            Ok(Ok(col)) => {
                forfeit(&mut record, LossCause::IllegalMove, format!("column {col} is not playable"));
                return record;
            }
            Ok(Err(e)) => {
                forfeit(&mut record, LossCause::IllegalMove, e.to_string());
                return record;
            }
            Err(RecvTimeoutError::Timeout) => {
                forfeit(&mut record, LossCause::Timeout, format!("no move within {:?}", time.per_move));
                return record;
            }
            Err(RecvTimeoutError::Disconnected) => {
                forfeit(&mut record, LossCause::IllegalMove, "agent crashed".into());
                return record;
            }
        };
        board = board.apply_move(col).expect("checked legal");
        record.moves.push(col);
        match board.outcome(Some(col)) {
            Outcome::Ongoing => {}
            Outcome::Win(m) => {
                record.result = MatchResult::win_for(m);
                record.cause = LossCause::Connected;
                return record;
            }
            Outcome::Draw => return record,
        }
    }
}

/// Builds both agents from their specs and plays one game.
pub fn play_match(
    p1: &AgentSpec,
    p2: &AgentSpec,
    config: GameConfig,
    time: TimeControl,
    seed: u64,
) -> Result<MatchRecord, SpecError> {
    let a = p1.build(derive_seed(seed, 1))?;
    let b = p2.build(derive_seed(seed, 2))?;
    Ok(play_agents(a, b, p1.to_string(), p2.to_string(), config, time, seed))
}
