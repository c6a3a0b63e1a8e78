use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, Context};
use connectx::alphazero::{policy_iteration, TrainError, TrainSummary};
use connectx::arena::{round_robin_with, RatingConfig, SpecError};
use connectx::minimax::{heuristic, HeuristicParams};
use connectx::neural::Real;
use connectx::{AgentSpec, Board, Mark, Outcome, Solver, TrainConfig};

use crate::{usage, CliError, GlobalArgs, Precision, TrainArgs};

fn spec_error(e: SpecError) -> CliError {
    usage(e.to_string())
}

fn read_board(g: &GlobalArgs, path: Option<PathBuf>, input: &mut dyn BufRead) -> Result<Board, CliError> {
    let Some(path) = path else {
        return Ok(Board::empty(g.game()?));
    };
    let text = if path == Path::new("-") {
        let mut s = String::new();
        input.read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?
    };
    Board::parse(text.trim()).map_err(|e| usage(format!("bad board: {e}")))
}

pub fn play(
    g: &GlobalArgs,
    spec: &AgentSpec,
    human_first: bool,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let config = g.game()?;
    let time = g.time()?;
    let mut agent = spec.build(g.seed).map_err(spec_error)?;
    let human = if human_first { Mark::P1 } else { Mark::P2 };
    let symbol = if human == Mark::P1 { 'X' } else { 'O' };
    writeln!(out, "{config}: you are player {human} ({symbol}) against {spec}")?;
    let mut board = Board::empty(config);
    loop {
        let col = if board.to_move() == human {
            writeln!(out, "{board}\n")?;
            loop {
                write!(out, "your move [0-{}, q to quit]: ", config.cols() - 1)?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    return Err(anyhow!("input closed").into());
                }
                let line = line.trim();
                if line == "q" || line == "quit" {
                    writeln!(out, "you resigned")?;
                    return Ok(());
                }
                match line.parse::<usize>() {
                    Ok(c) if board.is_legal(c) => break c,
                    _ => writeln!(out, "{line:?} is not a playable column, try again")?,
                }
            }
        } else {
            let deadline = Instant::now() + time.agent_budget();
            let c = agent
                .choose(&board, board.to_move(), deadline)
                .map_err(|e| anyhow!("agent failed: {e}"))?;
            if !board.is_legal(c) {
                return Err(anyhow!("agent chose unplayable column {c}").into());
            }
            writeln!(out, "{} plays {c}", agent.name())?;
            c
        };
        board = board.apply_move(col).expect("checked legal");
        let outcome = board.outcome(Some(col));
        if outcome.is_over() {
            writeln!(out, "{board}\n")?;
            let verdict = match outcome {
                Outcome::Win(m) if m == human => "you win",
                Outcome::Win(_) => "you lose",
                _ => "draw",
            };
            writeln!(out, "{verdict}")?;
            return Ok(());
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn tournament(
    g: &GlobalArgs,
    agents: &[AgentSpec],
    games: usize,
    table_path: Option<PathBuf>,
    records: Option<PathBuf>,
    workers: usize,
    ratings: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let config = g.game()?;
    let time = g.time()?;
    if agents.len() < 2 {
        return Err(usage("a tournament needs at least two agents"));
    }
    if games == 0 {
        return Err(usage("--games must be at least 1"));
    }
    for spec in agents {
        spec.build(0).map_err(spec_error)?;
    }
    let writer = match &records {
        Some(path) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            Some(Mutex::new(BufWriter::new(file)))
        }
        None => None,
    };
    // each record is flushed as soon as its match ends, so an interrupted
    // run keeps everything finished so far
    let on_record = |_: &_, r: &connectx::MatchRecord| {
        if let Some(w) = &writer {
            let mut w = w.lock().expect("records lock");
            if let Err(e) = writeln!(w, "{}", r.to_json_line()).and_then(|_| w.flush()) {
                log::error!("writing match record: {e}");
            }
        }
    };
    let t = round_robin_with(agents, games, config, time, g.seed, workers, &on_record).map_err(spec_error)?;
    let table = t.table.render();
    let table = table.trim_end();
    writeln!(out, "{table}")?;
    if ratings {
        let r = t.ratings(&RatingConfig::default());
        writeln!(out)?;
        for (name, rating) in t.table.names.iter().zip(r) {
            writeln!(out, "{name:<12} {rating:7.1}")?;
        }
    }
    if let Some(path) = table_path {
        fs::write(&path, format!("{table}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn train_config(g: &GlobalArgs, a: &TrainArgs) -> Result<TrainConfig, CliError> {
    let mut c = TrainConfig {
        game: g.game()?,
        seed: g.seed,
        ..TrainConfig::default()
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = a.$field {
                c.$field = v;
            })*
        };
    }
    set!(gating_threshold, gating_games, replay_capacity, temperature_plies, c_puct, batch_size, epochs, lr, l2);
    set!(dirichlet_alpha, dirichlet_weight);
    if let Some(v) = a.iters {
        c.num_iters = v;
    }
    if let Some(v) = a.episodes {
        c.num_episodes = v;
    }
    if let Some(v) = a.sims {
        c.num_sims = v;
    }
    if let Some(v) = a.filters {
        c.architecture.filters = v;
    }
    if let Some(v) = a.hidden {
        c.architecture.hidden = v;
    }
    c.validate().map_err(|e| usage(e.to_string()))?;
    Ok(c)
}

fn train_error(e: TrainError) -> CliError {
    match e {
        TrainError::InvalidConfig(msg) => usage(msg),
        other => CliError::Runtime(other.into()),
    }
}

fn report<F: Real>(summary: &TrainSummary<F>, out: &mut dyn Write) -> Result<(), CliError> {
    for l in &summary.logs {
        let g = &l.gate;
        writeln!(
            out,
            "iteration {}: {} examples (buffer {}), loss {:.4} (policy {:.4}, value {:.4}), gate {}/{}/{} {}",
            l.iteration,
            l.examples_added,
            l.buffer_examples,
            l.train.loss.total(),
            l.train.loss.policy,
            l.train.loss.value,
            g.wins_new,
            g.wins_old,
            g.draws,
            if g.promoted { "promoted" } else { "rejected" },
        )?;
    }
    writeln!(out, "best checkpoint: {}", summary.best_path.display())?;
    Ok(())
}

pub fn train(g: &GlobalArgs, args: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = train_config(g, args)?;
    match args.precision {
        Precision::F32 => report(&policy_iteration::<f32>(&config, &args.out_dir).map_err(train_error)?, out),
        Precision::F64 => report(&policy_iteration::<f64>(&config, &args.out_dir).map_err(train_error)?, out),
    }
}

pub fn eval(
    g: &GlobalArgs,
    spec: &AgentSpec,
    path: Option<PathBuf>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let board = read_board(g, path, input)?;
    let time = g.time()?;
    if board.outcome(None).is_over() {
        return Err(usage("the game in this position is already over"));
    }
    let mut agent = spec.build(g.seed).map_err(spec_error)?;
    let mark = board.to_move();
    let col = agent
        .choose(&board, mark, Instant::now() + time.agent_budget())
        .map_err(|e| anyhow!("agent failed: {e}"))?;
    writeln!(out, "{board}\n")?;
    writeln!(out, "player {mark} to move")?;
    writeln!(out, "heuristic: {}", heuristic(&board, mark, &HeuristicParams::default()))?;
    writeln!(out, "{} plays {col}", agent.name())?;
    Ok(())
}

fn signed(v: i8) -> &'static str {
    match v {
        1 => "+1",
        0 => "0",
        _ => "-1",
    }
}

fn describe(v: i8) -> &'static str {
    match v {
        1 => "win",
        0 => "draw",
        _ => "loss",
    }
}

pub fn solve(g: &GlobalArgs, path: Option<PathBuf>, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let board = read_board(g, path, input)?;
    let mark = board.to_move();
    let mut solver = Solver::default();
    let value = solver.solve(&board, mark).map_err(|e| anyhow!(e))?;
    writeln!(out, "{}, player {mark} to move", board.config())?;
    writeln!(out, "value: {} ({} for player {mark})", signed(value), describe(value))?;
    if !board.outcome(None).is_over() {
        for col in board.legal_moves() {
            let v = solver.solve(&board.apply_move(col).expect("legal"), mark).map_err(|e| anyhow!(e))?;
            writeln!(out, "column {col}: {}", signed(v))?;
        }
    }
    Ok(())
}
