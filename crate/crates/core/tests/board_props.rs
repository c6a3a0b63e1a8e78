mod common;

use std::collections::HashMap;

use connectx::{Board, GameConfig, GameError, Mark, Outcome};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config_strategy() -> impl Strategy<Value = GameConfig> {
    (1usize..=12, 1usize..=12)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), 1..=r.max(c)))
        .prop_map(|(r, c, x)| GameConfig::new(r, c, x).unwrap())
}

fn game_strategy() -> impl Strategy<Value = (GameConfig, Vec<usize>)> {
    config_strategy().prop_flat_map(|cfg| {
        let cols = cfg.cols();
        (Just(cfg), prop::collection::vec(0..cols, 0..=cfg.cells()))
    })
}

/// Applies `picks` (taken modulo the open columns) until the game ends.
fn play_picks(cfg: GameConfig, picks: &[usize]) -> Vec<(Board, usize)> {
    let mut board = Board::empty(cfg);
    let mut out = Vec::new();
    for &p in picks {
        let legal = board.legal_moves();
        if legal.is_empty() || board.outcome(None).is_over() {
            break;
        }
        let col = legal[p % legal.len()];
        board = board.apply_move(col).unwrap();
        out.push((board, col));
    }
    out
}

proptest! {
    #[test]
    fn tokens_rest_on_gravity((cfg, picks) in game_strategy()) {
        for (board, col) in play_picks(cfg, &picks) {
            let g = common::grid(&board);
            for c in 0..cfg.cols() {
                let filled: Vec<bool> = (0..cfg.rows()).map(|r| g[r][c].is_some()).collect();
                // once a cell is filled every cell below it is filled
                if let Some(top) = filled.iter().position(|&f| f) {
                    prop_assert!(filled[top..].iter().all(|&f| f));
                }
                prop_assert_eq!(filled.iter().filter(|&&f| f).count(), board.height(c));
            }
            let p1 = g.iter().flatten().filter(|&&m| m == Some(Mark::P1)).count();
            let p2 = g.iter().flatten().filter(|&&m| m == Some(Mark::P2)).count();
            prop_assert!(p1 == p2 || p1 == p2 + 1);
            prop_assert_eq!(board.to_move(), if p1 == p2 { Mark::P1 } else { Mark::P2 });
            prop_assert!(board.height(col) >= 1);
        }
    }

    #[test]
    fn serialization_round_trips((cfg, picks) in game_strategy()) {
        for (board, _) in play_picks(cfg, &picks) {
            let text = board.serialize();
            prop_assert_eq!(Board::parse(&text).unwrap(), board);
            prop_assert_eq!(Board::parse_with(&text, cfg).unwrap(), board);
        }
    }

    #[test]
    fn full_columns_are_rejected((cfg, picks) in game_strategy()) {
        if let Some((board, _)) = play_picks(cfg, &picks).last() {
            for c in 0..cfg.cols() + 2 {
                let legal = c < cfg.cols() && board.height(c) < cfg.rows();
                prop_assert_eq!(board.is_legal(c), legal);
                if !legal {
                    let is_illegal = matches!(board.apply_move(c), Err(GameError::IllegalMove { .. }));
                    prop_assert!(is_illegal);
                }
            }
        }
    }
}

#[test]
fn local_outcome_matches_full_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let configs = [
        GameConfig::CONNECT_FOUR,
        GameConfig::new(4, 5, 3).unwrap(),
        GameConfig::new(3, 3, 3).unwrap(),
        GameConfig::new(12, 12, 5).unwrap(),
        GameConfig::new(1, 8, 4).unwrap(),
        GameConfig::new(9, 2, 2).unwrap(),
    ];
    let mut finished = 0;
    for g in 0..10_000 {
        let cfg = configs[g % configs.len()];
        let (boards, moves) = common::random_game(cfg, &mut rng);
        for (board, &col) in boards[1..].iter().zip(&moves) {
            let oracle = common::naive_outcome(board);
            assert_eq!(board.outcome(Some(col)), oracle, "{board:?}");
            assert_eq!(board.outcome(None), oracle);
        }
        if boards.last().unwrap().outcome(None).is_over() {
            finished += 1;
        }
    }
    assert_eq!(finished, 10_000);
}

#[test]
fn position_hash_has_no_collisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut seen: HashMap<u64, Board> = HashMap::new();
    let mut distinct = 0;
    while distinct < 100_000 {
        let (boards, _) = common::random_game(GameConfig::CONNECT_FOUR, &mut rng);
        for b in boards {
            match seen.get(&b.position_hash()) {
                Some(prev) => assert_eq!(prev, &b, "hash collision"),
                None => {
                    seen.insert(b.position_hash(), b);
                    distinct += 1;
                }
            }
        }
    }
}

#[test]
fn parse_rejects_malformed_text() {
    let bad = [
        "",
        "6 7 4 1",
        "2 2 2 1\n..\n.x",
        "2 2 2 1\n1.\n..",
        "2 2 2 1\n..\n11",
        "2 2 2 2\n..\n..",
        "2 2 3 1\n..\n..",
        "2 2 2 1\n...\n..",
        "2 2 2 1\n..\n..\n..",
    ];
    for text in bad {
        assert!(Board::parse(text).is_err(), "{text:?}");
    }
    let ok = Board::parse("2 2 2 1\n..\n12").unwrap();
    assert_eq!(ok.outcome(None), Outcome::Ongoing);
    assert_eq!(ok.to_move(), Mark::P1);
}

#[test]
fn config_bounds() {
    assert!(GameConfig::new(12, 12, 12).is_ok());
    assert!(GameConfig::new(13, 7, 4).is_err());
    assert!(GameConfig::new(6, 13, 4).is_err());
    assert!(GameConfig::new(0, 7, 4).is_err());
    assert!(GameConfig::new(6, 7, 8).is_err());
    assert!(GameConfig::new(6, 7, 0).is_err());
}
