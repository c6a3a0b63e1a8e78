//! Per-iteration checks of the UCT tree.
#![allow(dead_code)]

use connectx::mcts::{Rollout, Tree};
use connectx::Board;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Checks the tree after every iteration and returns how many iterations
/// ended in a draw.
pub fn run_checked(board: Board, iterations: u32, rollout: Rollout, seed: u64) -> u32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = Tree::new(board);
    let mut draws = 0;
    for i in 1..=iterations {
        let before: Vec<(f64, u32)> = tree.nodes().iter().map(|n| (n.w, n.n)).collect();
        let path = tree.iterate(std::f64::consts::SQRT_2, &rollout, &mut rng);
        assert_eq!(tree.root().n, i);
        assert_eq!(path[0], Tree::ROOT);

        let deltas: Vec<f64> = path
            .iter()
            .map(|&id| {
                let (w0, n0) = before.get(id).copied().unwrap_or((0.0, 0));
                assert_eq!(tree.node(id).n, n0 + 1);
                tree.node(id).w - w0
            })
            .collect();
        if deltas.iter().all(|&d| d == 0.5) {
            draws += 1;
        } else {
            // a decisive result credits alternate plies with exactly 1 and 0
            for pair in deltas.windows(2) {
                assert!((pair[0] == 1.0 && pair[1] == 0.0) || (pair[0] == 0.0 && pair[1] == 1.0), "{deltas:?}");
            }
        }
        for (id, node) in tree.nodes().iter().enumerate() {
            assert!(node.w >= 0.0 && node.w <= node.n as f64, "node {id}");
            if !path.contains(&id) {
                if let Some(&(w0, n0)) = before.get(id) {
                    assert_eq!((node.w, node.n), (w0, n0));
                }
            }
            let child_visits: u32 = node.children.iter().map(|&(_, c)| tree.node(c).n).sum();
            if id == Tree::ROOT {
                assert_eq!(child_visits + u32::from(node.terminal.is_some()) * node.n, node.n);
            } else if node.terminal.is_some() {
                assert!(node.children.is_empty());
            } else {
                // one visit when the node was created, the rest pass through
                assert_eq!(child_visits + 1, node.n);
            }
        }
    }
    draws
}
