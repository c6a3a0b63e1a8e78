use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::encode::{encode_into, legal_mask};
use crate::agent::AgentError;
use crate::board::{Board, Outcome};
use crate::neural::{masked_softmax, Network, Real, ACTIONS, INPUT_LEN};

const NONE: u32 = u32::MAX;

/// Root exploration noise mixed into the priors during self-play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletNoise {
    pub alpha: f64,
    pub weight: f64,
}

impl Default for DirichletNoise {
    fn default() -> Self {
        DirichletNoise { alpha: 1.0, weight: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Root visit counts per column.
    pub visits: [u32; ACTIONS],
    /// Masked network priors at the root, after any noise.
    pub priors: [f64; ACTIONS],
    /// Mean backed-up value at the root for the side to move.
    pub value: f64,
    /// Simulations completed; equals the sum of `visits`.
    pub simulations: u32,
}

impl SearchResult {
    /// Most visited column, ties broken by the higher prior then the lower
    /// column.
    pub fn best_move(&self) -> usize {
        let mut best = None::<usize>;
        for a in 0..ACTIONS {
            if self.priors[a] <= 0.0 && self.visits[a] == 0 {
                continue;
            }
            best = match best {
                Some(b) if (self.visits[b], self.priors[b]) >= (self.visits[a], self.priors[a]) => Some(b),
                _ => Some(a),
            };
        }
        best.expect("search ran on a position with legal moves")
    }
}

struct Node {
    board: Board,
    /// Value for the side to move when the position is already decided.
    terminal: Option<f64>,
    expanded: bool,
    legal: [bool; ACTIONS],
    prior: [f64; ACTIONS],
    n: [u32; ACTIONS],
    w: [f64; ACTIONS],
    child: [u32; ACTIONS],
    total: u32,
}

impl Node {
    fn new(board: Board, last_move: Option<usize>) -> Node {
        let terminal = match board.outcome(last_move) {
            Outcome::Ongoing => None,
            Outcome::Draw => Some(0.0),
            // the side that just moved won
            Outcome::Win(_) => Some(-1.0),
        };
        Node {
            board,
            terminal,
            expanded: false,
            legal: legal_mask(&board),
            prior: [0.0; ACTIONS],
            n: [0; ACTIONS],
            w: [0.0; ACTIONS],
            child: [NONE; ACTIONS],
            total: 0,
        }
    }

    fn select<R: Rng>(&self, c_puct: f64, rng: &mut R) -> usize {
        let sqrt_n = (self.total as f64).sqrt();
        let mut best = f64::NEG_INFINITY;
        let mut ties = [0usize; ACTIONS];
        let mut count = 0;
        for a in 0..ACTIONS {
            if !self.legal[a] {
                continue;
            }
            let q = if self.n[a] == 0 { 0.0 } else { self.w[a] / self.n[a] as f64 };
            // before any visit the exploration term vanishes; let the prior decide
            let u = if self.total == 0 {
                self.prior[a]
            } else {
                c_puct * self.prior[a] * sqrt_n / (1.0 + self.n[a] as f64)
            };
            let score = q + u;
            if score > best {
                best = score;
                count = 0;
            }
            if score == best {
                ties[count] = a;
                count += 1;
            }
        }
        ties[rng.random_range(0..count)]
    }
}

struct Evaluator<'a, F: Real> {
    net: &'a Network<F>,
    buf: Vec<F>,
}

impl<F: Real> Evaluator<'_, F> {
    /// Masked priors and value for the side to move.
    fn eval(&mut self, board: &Board, mask: &[bool; ACTIONS]) -> Result<([f64; ACTIONS], f64), AgentError> {
        encode_into(board, board.to_move(), &mut self.buf);
        let (logits, v) = self
            .net
            .predict(&self.buf)
            .map_err(|e| AgentError::Failed(e.to_string()))?;
        let p = masked_softmax(&logits, mask);
        let mut prior = [0.0; ACTIONS];
        for a in 0..ACTIONS {
            prior[a] = p[a].as_f64();
        }
        let v = v.as_f64();
        if !v.is_finite() || prior.iter().any(|p| !p.is_finite()) {
            return Err(AgentError::Failed("network produced a non-finite output".into()));
        }
        Ok((prior, v))
    }
}

fn add_noise<R: Rng>(prior: &mut [f64; ACTIONS], legal: &[bool; ACTIONS], noise: DirichletNoise, rng: &mut R) {
    let gamma = Gamma::new(noise.alpha, 1.0).expect("positive alpha");
    let mut eta = [0.0; ACTIONS];
    let mut sum = 0.0;
    for a in 0..ACTIONS {
        if legal[a] {
            eta[a] = gamma.sample(rng);
            sum += eta[a];
        }
    }
    if sum <= 0.0 {
        return;
    }
    for a in 0..ACTIONS {
        if legal[a] {
            prior[a] = (1.0 - noise.weight) * prior[a] + noise.weight * eta[a] / sum;
        }
    }
}

/// Runs up to `sims` PUCT simulations from `board` for the side to move.
///
/// The root is expanded before the first simulation, so every simulation
/// adds exactly one root visit. Leaves are valued by the network, decided
/// positions by their true result. The search stops early at `deadline`
/// once at least one simulation has finished.
pub fn guided_search<F: Real, R: Rng>(
    board: &Board,
    net: &Network<F>,
    sims: u32,
    c_puct: f64,
    noise: Option<DirichletNoise>,
    deadline: Option<Instant>,
    rng: &mut R,
) -> Result<SearchResult, AgentError> {
    let mut root = Node::new(*board, None);
    if root.terminal.is_some() || !root.legal.iter().any(|&l| l) {
        return Err(AgentError::NoLegalMove);
    }
    let mut eval = Evaluator {
        net,
        buf: vec![F::zero(); INPUT_LEN],
    };
    let (mut prior, _) = eval.eval(board, &root.legal)?;
    if let Some(noise) = noise {
        add_noise(&mut prior, &root.legal, noise, rng);
    }
    root.prior = prior;
    root.expanded = true;

    let mut nodes = vec![root];
    let mut path: Vec<(u32, usize)> = Vec::new();
    let mut done = 0;
    while done < sims.max(1) {
        if done > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        path.clear();
        let mut id = 0u32;
        // value of the reached leaf for its side to move
        let leaf_value = loop {
            let node = &nodes[id as usize];
            if let Some(v) = node.terminal {
                break v;
            }
            if !node.expanded {
                let (p, v) = eval.eval(&node.board, &node.legal)?;
                let node = &mut nodes[id as usize];
                node.prior = p;
                node.expanded = true;
                break v;
            }
            let a = node.select(c_puct, rng);
            path.push((id, a));
            let next = node.child[a];
            if next == NONE {
                let child_board = node.board.apply_move(a).expect("selected column is legal");
                let child_id = nodes.len() as u32;
                nodes.push(Node::new(child_board, Some(a)));
                nodes[id as usize].child[a] = child_id;
                id = child_id;
            } else {
                id = next;
            }
        };
        let mut v = leaf_value;
        for &(parent, a) in path.iter().rev() {
            // the parent's mover sees the negation of the child's value
            v = -v;
            let node = &mut nodes[parent as usize];
            node.n[a] += 1;
            node.w[a] += v;
            node.total += 1;
        }
        done += 1;
    }

    let root = &nodes[0];
    debug_assert_eq!(root.n.iter().sum::<u32>(), done);
    let value = if root.total == 0 {
        0.0
    } else {
        root.w.iter().sum::<f64>() / root.total as f64
    };
    Ok(SearchResult {
        visits: root.n,
        priors: root.prior,
        value,
        simulations: done,
    })
}

/// `π(a) ∝ n(a)^(1/τ)` over legal columns. `temperature == 0` puts all mass
/// on one most-visited column, chosen uniformly among ties. With no visits
/// at all the legal columns share the mass equally.
pub fn visit_policy<R: Rng>(
    visits: &[u32; ACTIONS],
    legal: &[bool; ACTIONS],
    temperature: f64,
    rng: &mut R,
) -> [f64; ACTIONS] {
    let mut pi = [0.0; ACTIONS];
    let legal_count = legal.iter().filter(|&&l| l).count();
    assert!(legal_count > 0, "visit policy needs a legal column");
    let total: u32 = (0..ACTIONS).filter(|&a| legal[a]).map(|a| visits[a]).sum();
    if total == 0 {
        for a in 0..ACTIONS {
            if legal[a] {
                pi[a] = 1.0 / legal_count as f64;
            }
        }
        return pi;
    }
    if temperature <= 0.0 {
        let max = (0..ACTIONS).filter(|&a| legal[a]).map(|a| visits[a]).max().unwrap();
        let ties: Vec<usize> = (0..ACTIONS).filter(|&a| legal[a] && visits[a] == max).collect();
        pi[ties[rng.random_range(0..ties.len())]] = 1.0;
        return pi;
    }
    let max = visits.iter().copied().max().unwrap() as f64;
    let mut sum = 0.0;
    for a in 0..ACTIONS {
        if legal[a] && visits[a] > 0 {
            // scaled by the max so large counts and small τ stay finite
            pi[a] = (visits[a] as f64 / max).powf(1.0 / temperature);
            sum += pi[a];
        }
    }
    for p in &mut pi {
        *p /= sum;
    }
    pi
}
