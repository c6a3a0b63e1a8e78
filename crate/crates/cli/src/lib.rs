//! The `connectx` command line: interactive play, tournaments, training,
//! position evaluation, exhaustive solving and the HTTP game service.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use connectx::{AgentSpec, GameConfig, TimeControl};

mod commands;
pub mod serve;

#[derive(Debug, Parser)]
#[command(name = "connectx", version, about = "ConnectX agents, tournaments and training")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 6)]
    pub rows: usize,
    #[arg(long, global = true, default_value_t = 7)]
    pub cols: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub inarow: usize,
    /// Seconds per move.
    #[arg(long = "time-limit", global = true, default_value_t = 5.0)]
    pub time_limit: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play against an agent in the terminal.
    Play {
        #[arg(long, default_value = "greedy")]
        agent: AgentSpec,
        /// Let the agent move first.
        #[arg(long)]
        second: bool,
    },
    /// Round-robin cross-play between agents.
    Tournament {
        /// Comma-separated agent specs.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        agents: Vec<AgentSpec>,
        /// Games per pair of agents.
        #[arg(long, default_value_t = 10)]
        games: usize,
        /// Also write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append one JSON record per match here.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Print Elo ratings after the table.
        #[arg(long)]
        ratings: bool,
    },
    /// AlphaZero-style self-play training.
    Train(TrainArgs),
    /// Ask an agent for its move in a position.
    Eval {
        #[arg(long)]
        agent: AgentSpec,
        /// Board file in the serialized text format, `-` for stdin. Defaults
        /// to the empty board.
        #[arg(long)]
        board: Option<PathBuf>,
    },
    /// Exhaustively solve a small position.
    Solve {
        /// Board file in the serialized text format, `-` for stdin. Defaults
        /// to the empty board.
        #[arg(long)]
        board: Option<PathBuf>,
    },
    /// Run the HTTP game service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static files served at `/`.
        #[arg(long = "static-dir")]
        static_dir: Option<PathBuf>,
        /// Finished sessions beyond this many are evicted.
        #[arg(long = "max-sessions", default_value_t = 1000)]
        max_sessions: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F32,
    F64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long = "out-dir", default_value = "runs/train")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "f32")]
    pub precision: Precision,
    #[arg(long)]
    pub iters: Option<u64>,
    #[arg(long)]
    pub episodes: Option<u32>,
    #[arg(long)]
    pub sims: Option<u32>,
    #[arg(long = "gating-threshold")]
    pub gating_threshold: Option<f64>,
    #[arg(long = "gating-games")]
    pub gating_games: Option<u32>,
    /// Iterations of examples kept for training.
    #[arg(long = "replay-capacity")]
    pub replay_capacity: Option<usize>,
    /// Plies sampled at temperature 1 before play turns greedy.
    #[arg(long = "temperature-plies")]
    pub temperature_plies: Option<usize>,
    #[arg(long = "c-puct")]
    pub c_puct: Option<f64>,
    #[arg(long = "batch-size")]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub epochs: Option<u32>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long = "dirichlet-alpha")]
    pub dirichlet_alpha: Option<f64>,
    #[arg(long = "dirichlet-weight")]
    pub dirichlet_weight: Option<f64>,
    #[arg(long)]
    pub filters: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
}

/// How a command failed: bad input (exit 2) or a failure while running (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl GlobalArgs {
    pub fn game(&self) -> Result<GameConfig, CliError> {
        GameConfig::new(self.rows, self.cols, self.inarow).map_err(|e| usage(e.to_string()))
    }

    pub fn time(&self) -> Result<TimeControl, CliError> {
        if !(self.time_limit.is_finite() && self.time_limit > 0.0) {
            return Err(usage("--time-limit must be a positive number of seconds"));
        }
        Duration::try_from_secs_f64(self.time_limit)
            .map(TimeControl::per_move)
            .map_err(|e| usage(e.to_string()))
    }
}

/// Logging goes to stderr; `CONNECTX_LOG` sets the filter (default `warn`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("CONNECTX_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, input, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Play { agent, second } => commands::play(g, &agent, !second, input, out),
        Command::Tournament {
            agents,
            games,
            out: table_path,
            records,
            workers,
            ratings,
        } => commands::tournament(g, &agents, games, table_path, records, workers, ratings, out),
        Command::Train(args) => commands::train(g, &args, out),
        Command::Eval { agent, board } => commands::eval(g, &agent, board, input, out),
        Command::Solve { board } => commands::solve(g, board, input, out),
        Command::Serve {
            port,
            host,
            static_dir,
            max_sessions,
        } => {
            let config = serve::ServeConfig {
                time: g.time()?,
                max_sessions,
                seed: g.seed,
                static_dir,
            };
            let addr = format!("{host}:{port}");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve::run(&addr, config)).map_err(CliError::Runtime)
        }
    }
}
