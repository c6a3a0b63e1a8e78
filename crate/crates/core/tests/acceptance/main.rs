//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fail. Pass criterion numbers as arguments to run a subset.

#[path = "../common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use connectx::alphazero::{execute_episode, policy_iteration};
use connectx::arena::{play_agents, round_robin, LossCause, MatchResult};
use connectx::mcts::{Rollout, Tree};
use connectx::minimax::{self, solve_exhaustive, HeuristicParams};
use connectx::neural::{loss, Tensor, ACTIONS};
use connectx::{
    Agent, AgentError, AgentSpec, AlphaZeroAgent, Board, GameConfig, GreedyAgent, Mark, MctsAgent, MinimaxAgent,
    MinimaxConfig, Outcome, RandomAgent, SearchParams, TimeControl, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alphabeta_exactness() -> Check {
    let params = HeuristicParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for cfg in [GameConfig::new(4, 4, 3).unwrap(), GameConfig::new(5, 5, 4).unwrap()] {
        for _ in 0..200 {
            let b = common::random_position(cfg, cfg.cells() - 1, &mut rng);
            let mark = b.to_move();
            for depth in 1..=4 {
                let oracle = common::plain_minimax(&b, mark, depth, &params);
                let ab = minimax::alphabeta(&b, mark, depth, f64::NEG_INFINITY, f64::INFINITY, true, &params);
                ensure(ab == oracle, || format!("depth {depth}: {ab} vs {oracle}\n{}", b.serialize()))?;
                ensure(ab.fract() == 0.0, || format!("non-integer value {ab}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} comparisons"))
}

fn self_play(p1: &mut dyn Agent, p2: &mut dyn Agent, cfg: GameConfig) -> Outcome {
    let mut board = Board::empty(cfg);
    let deadline = || Instant::now() + Duration::from_secs(600);
    loop {
        let agent: &mut dyn Agent = if board.to_move() == Mark::P1 { &mut *p1 } else { &mut *p2 };
        let col = agent.choose(&board, board.to_move(), deadline()).expect("a legal move exists");
        board = board.apply_move(col).expect("agents play legal moves");
        let outcome = board.outcome(Some(col));
        if outcome.is_over() {
            return outcome;
        }
    }
}

/// Game value for P1: 1, 0 or -1.
fn p1_value(outcome: Outcome) -> i8 {
    match outcome {
        Outcome::Win(Mark::P1) => 1,
        Outcome::Win(Mark::P2) => -1,
        _ => 0,
    }
}

fn perfect_play_oracle() -> Check {
    let mut report = Vec::new();
    let mut values = Vec::new();
    for cfg in [GameConfig::new(3, 3, 3).unwrap(), GameConfig::new(3, 4, 3).unwrap()] {
        let empty = Board::empty(cfg);
        let value = solve_exhaustive(&empty, Mark::P1).map_err(|e| e.to_string())?;
        ensure(value == common::plain_negamax(&empty), || "solver disagrees with negamax".into())?;
        let full = MinimaxConfig {
            depth: cfg.cells() as u32,
            ..MinimaxConfig::default()
        };
        let got = p1_value(self_play(&mut MinimaxAgent::new(full), &mut MinimaxAgent::new(full), cfg));
        ensure(got == value, || format!("{cfg:?}: alphabeta self-play gave {got}, oracle {value}"))?;
        report.push(format!("{}x{}/{} value {value}", cfg.rows(), cfg.cols(), cfg.inarow()));
        values.push(value);
    }
    let cfg = GameConfig::new(3, 3, 3).unwrap();
    let value = values[0];
    let mut good = 0;
    for seed in 0..100 {
        let mut a = MctsAgent::new(SearchParams::plain(2 * seed));
        let mut b = MctsAgent::new(SearchParams::plain(2 * seed + 1));
        let got = p1_value(self_play(&mut a, &mut b, cfg));
        // P1 must do at least as well as the value and P2 must concede no more
        if got >= value && -got >= -value {
            good += 1;
        }
    }
    ensure(good >= 95, || format!("MCTS matched the oracle in {good}/100"))?;
    report.push(format!("MCTS self-play at oracle value {good}/100"));
    Ok(report.join(", "))
}

fn agent_comparison() -> Check {
    let specs: Vec<AgentSpec> = ["greedy", "mcts", "minimax:depth=5", "hybrid"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let t = round_robin(
        &specs,
        10,
        GameConfig::CONNECT_FOUR,
        TimeControl::per_move(Duration::from_secs(1)),
        2024,
        thread::available_parallelism().map_or(1, |n| n.get()),
    )
    .map_err(|e| e.to_string())?;
    println!("{}", t.table.render());
    for r in &t.records {
        ensure(matches!(r.cause, LossCause::Connected | LossCause::None), || {
            format!("{} vs {} forfeited: {:?} {:?}", r.p1, r.p2, r.cause, r.detail)
        })?;
    }
    let mcts = t.table.cell(0, 1).col_wins;
    let minimax = t.table.cell(0, 2).col_wins;
    ensure(mcts >= 9 && minimax >= 9, || format!("vs greedy: mcts {mcts}/10, minimax {minimax}/10"))?;
    Ok(format!("vs greedy: mcts {mcts}/10, minimax {minimax}/10"))
}

fn gradient_fidelity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net = connectx::neural::Network::<f64>::new(Default::default(), &mut rng);
    let batch = common::grad::random_batch(3, &mut rng);
    let mut worst: f64 = 0.0;
    let mut per_layer: Vec<(&str, usize)> = Vec::new();
    for check in common::grad::check_network(&net, &batch, 1e-4, 24, 1e-5, &mut rng) {
        ensure(check.max_rel <= 1e-4, || format!("{}: {:.3e}", check.name, check.max_rel))?;
        worst = worst.max(check.max_rel);
        let layer = check.name.split('.').next().unwrap();
        match per_layer.iter_mut().find(|(l, _)| *l == layer) {
            Some((_, n)) => *n += check.sampled,
            None => per_layer.push((layer, check.sampled)),
        }
    }
    for (layer, n) in &per_layer {
        ensure(*n >= 20, || format!("only {n} samples for {layer}"))?;
    }
    let counts: Vec<String> = per_layer.iter().map(|(l, n)| format!("{l} {n}")).collect();
    Ok(format!("max relative error {worst:.2e} ({})", counts.join(", ")))
}

fn loss_spot_value() -> Check {
    let mut mask = [false; ACTIONS];
    mask[..7].fill(true);
    let pi: Vec<f64> = (0..ACTIONS).map(|a| if a < 7 { 1.0 / 7.0 } else { 0.0 }).collect();
    let parts = loss(
        &Tensor::zeros(&[1, ACTIONS]),
        &Tensor::zeros(&[1, 1]),
        &Tensor::from_vec(&[1, ACTIONS], pi).unwrap(),
        &Tensor::from_vec(&[1, 1], vec![1.0]).unwrap(),
        &[mask],
    )
    .map_err(|e| e.to_string())?;
    let expected = 1.0 + 7f64.ln();
    let err = (parts.total() - expected).abs();
    ensure(err <= 1e-9, || format!("loss {} vs {expected}", parts.total()))?;
    Ok(format!("loss {:.12}", parts.total()))
}

fn score_against(agent: &mut dyn FnMut(u64) -> Box<dyn Agent>, opponent: &dyn Fn(u64) -> Box<dyn Agent>, cfg: GameConfig, games: u64) -> u32 {
    let mut wins = 0;
    for g in 0..games {
        let (a, b) = (agent(g), opponent(g));
        let first = g % 2 == 0;
        let r = if first {
            play_agents(a, b, "az".into(), "opp".into(), cfg, TimeControl::default(), g)
        } else {
            play_agents(b, a, "opp".into(), "az".into(), cfg, TimeControl::default(), g)
        };
        let mine = if first { MatchResult::P1Win } else { MatchResult::P2Win };
        wins += u32::from(r.result == mine);
    }
    wins
}

fn alphazero_smoke() -> Check {
    let cfg = GameConfig::new(4, 5, 3).unwrap();
    let config = TrainConfig {
        game: cfg,
        num_iters: 5,
        num_episodes: 25,
        num_sims: 50,
        gating_threshold: 0.6,
        seed: 6,
        ..TrainConfig::default()
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let summary = policy_iteration::<f32>(&config, dir.path()).map_err(|e| e.to_string())?;
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    ensure(minutes < 60.0, || format!("training took {minutes:.1} min"))?;
    ensure(summary.logs.len() == 5, || "missing iterations".into())?;
    let decided = summary.logs.iter().filter(|l| l.gate.fraction.is_some()).count();
    ensure(decided >= 1, || "no gating decision was made on decided games".into())?;
    for l in &summary.logs {
        let expect = l.gate.fraction.is_some_and(|f| f >= 0.6);
        ensure(l.gate.promoted == expect, || format!("iteration {} gate {:?}", l.iteration, l.gate))?;
    }
    let promoted = summary.logs.iter().filter(|l| l.gate.promoted).count();

    let net = std::sync::Arc::new(summary.checkpoint.network);
    // self-play with the final network; every sampled column is checked
    // against the board, on top of the sampler's own check during training
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for _ in 0..config.num_episodes {
        let ep = execute_episode(&*net, &config, &mut rng).map_err(|e| e.to_string())?;
        let mut b = Board::empty(cfg);
        for (&col, ex) in ep.moves.iter().zip(&ep.examples) {
            ensure(ex.mask[col] && b.is_legal(col), || format!("illegal sample {col}"))?;
            b = b.apply_move(col).map_err(|e| e.to_string())?;
        }
    }

    let mut az = |g: u64| -> Box<dyn Agent> { Box::new(AlphaZeroAgent::new(net.clone(), 50, config.c_puct, 1000 + g)) };
    let vs_random = score_against(&mut az, &|g| Box::new(RandomAgent::new(g)), cfg, 100);
    let vs_greedy = score_against(&mut az, &|_| Box::new(GreedyAgent), cfg, 100);
    let report = format!(
        "{minutes:.1} min, {decided} decided gates, {promoted} promotions, vs random {vs_random}/100, vs greedy {vs_greedy}/100"
    );
    ensure(vs_random >= 90 && vs_greedy >= 60, || report.clone())?;
    Ok(report)
}

fn mcts_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..3 {
        let b = common::random_position(GameConfig::CONNECT_FOUR, 16, &mut rng);
        common::invariants::run_checked(b, 1000, Rollout::Random, k);
    }
    let draws = common::invariants::run_checked(Board::empty(GameConfig::new(1, 3, 3).unwrap()), 1000, Rollout::Random, 9);
    ensure(draws == 1000, || format!("{draws} draw backups"))?;
    Ok("root.n, 0 <= w <= n and draw backups checked after every iteration".into())
}

fn sims_per_second(rollout: Rollout, budget: Duration) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tree = Tree::new(Board::empty(GameConfig::CONNECT_FOUR));
    let start = Instant::now();
    let mut n = 0u64;
    while start.elapsed() < budget {
        tree.iterate(std::f64::consts::SQRT_2, &rollout, &mut rng);
        n += 1;
    }
    n as f64 / start.elapsed().as_secs_f64()
}

fn throughput() -> Check {
    let plain = sims_per_second(Rollout::Random, Duration::from_secs(2));
    let hybrid = sims_per_second(Rollout::minimax(2), Duration::from_secs(2));
    let ratio = plain / hybrid;
    let report = format!("plain {plain:.0}/s, minimax-2 rollouts {hybrid:.0}/s, ratio {ratio:.1}x");
    ensure(ratio >= 10.0, || report.clone())?;
    Ok(report)
}

struct OffBoard;

impl Agent for OffBoard {
    fn name(&self) -> String {
        "offboard".into()
    }
    fn choose(&mut self, board: &Board, _: Mark, _: Instant) -> Result<usize, AgentError> {
        Ok(board.config().cols())
    }
}

struct FullColumn;

impl Agent for FullColumn {
    fn name(&self) -> String {
        "fullcolumn".into()
    }
    fn choose(&mut self, board: &Board, _: Mark, _: Instant) -> Result<usize, AgentError> {
        // first full column, else the first legal one
        Ok((0..board.config().cols()).find(|&c| !board.is_legal(c)).unwrap_or(board.legal_moves()[0]))
    }
}

struct Sleeper;

impl Agent for Sleeper {
    fn name(&self) -> String {
        "sleeper".into()
    }
    fn choose(&mut self, board: &Board, _: Mark, _: Instant) -> Result<usize, AgentError> {
        if board.ply() >= 2 {
            thread::sleep(Duration::from_secs(10));
        }
        Ok(board.legal_moves()[0])
    }
}

fn arena_rules() -> Check {
    let cfg = GameConfig::CONNECT_FOUR;
    let fast = TimeControl::per_move(Duration::from_secs(2));
    for (stub_first, seed) in [(true, 0), (false, 1)] {
        let stubs: [(Box<dyn Fn() -> Box<dyn Agent>>, LossCause, TimeControl); 3] = [
            (Box::new(|| Box::new(OffBoard)), LossCause::IllegalMove, fast),
            (Box::new(|| Box::new(FullColumn)), LossCause::IllegalMove, fast),
            (Box::new(|| Box::new(Sleeper)), LossCause::Timeout, TimeControl::per_move(Duration::from_millis(300))),
        ];
        for (make, cause, time) in &stubs {
            let stub = make();
            let name = stub.name();
            let r = if stub_first {
                play_agents(stub, Box::new(GreedyAgent), name.clone(), "greedy".into(), cfg, *time, seed)
            } else {
                play_agents(Box::new(GreedyAgent), stub, "greedy".into(), name.clone(), cfg, *time, seed)
            };
            let loser_won = if stub_first { MatchResult::P1Win } else { MatchResult::P2Win };
            ensure(r.cause == *cause && r.result != loser_won && r.result != MatchResult::Draw, || {
                format!("{name}: {:?} {:?}", r.result, r.cause)
            })?;
            ensure(r.replays_consistently(), || format!("{name}: record does not replay"))?;
            if *cause == LossCause::Timeout {
                let t = *r.think_ms.last().unwrap();
                ensure((t - 300.0).abs() <= 100.0, || format!("timeout after {t:.0} ms"))?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut connected = 0;
    for i in 0..1000u64 {
        let rows = rng.random_range(2..=8);
        let cols = rng.random_range(2..=8);
        let x = rng.random_range(2..=rows.max(cols).min(5));
        let cfg = GameConfig::new(rows, cols, x).unwrap();
        let r = play_agents(
            Box::new(RandomAgent::new(rng.random())),
            Box::new(RandomAgent::new(rng.random())),
            "random".into(),
            "random".into(),
            cfg,
            fast,
            i,
        );
        ensure(r.replays_consistently(), || format!("match {i} does not replay: {r:?}"))?;
        if r.cause == LossCause::Connected {
            let replayed = r.replay().map_err(|e| e.to_string())?;
            ensure(r.result.winner().map(Outcome::Win) == Some(replayed), || format!("match {i}"))?;
            connected += 1;
        }
    }
    Ok(format!("stubs forfeit correctly, 1000 fuzz records replay ({connected} won by a connection, winner confirmed)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("alpha-beta exactness", alphabeta_exactness),
        ("perfect-play oracle", perfect_play_oracle),
        ("agent comparison on 6x7", agent_comparison),
        ("gradient fidelity", gradient_fidelity),
        ("loss spot value", loss_spot_value),
        ("alphazero training smoke", alphazero_smoke),
        ("mcts invariants", mcts_invariants),
        ("rollout throughput", throughput),
        ("arena rules", arena_rules),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {n} {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n} {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
