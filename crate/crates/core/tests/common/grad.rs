//! Finite-difference gradient checking.
#![allow(dead_code)]

use connectx::neural::{Architecture, Batch, Network, Tensor, ACTIONS, BOARD, INPUT_LEN, IN_PLANES};
use rand::seq::index::sample;
use rand::Rng;

/// `|a − n| / max(|a|, |n|, 1e-8)`
pub fn rel_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Random real-valued states, random legal masks, matching π and z.
pub fn random_batch<R: Rng>(size: usize, rng: &mut R) -> Batch<f64> {
    let states: Vec<f64> = (0..size * INPUT_LEN).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut pi = Vec::with_capacity(size * ACTIONS);
    let mut z = Vec::with_capacity(size);
    let mut masks = Vec::with_capacity(size);
    for _ in 0..size {
        let mut mask = [false; ACTIONS];
        let open = rng.random_range(1..=ACTIONS);
        for a in sample(rng, ACTIONS, open) {
            mask[a] = true;
        }
        let raw: Vec<f64> = mask.iter().map(|&m| if m { rng.random_range(0.05..1.0) } else { 0.0 }).collect();
        let total: f64 = raw.iter().sum();
        pi.extend(raw.iter().map(|r| r / total));
        z.push(rng.random_range(-1.0..1.0));
        masks.push(mask);
    }
    Batch {
        states: Tensor::from_vec(&[size, BOARD, BOARD, IN_PLANES], states).unwrap(),
        pi: Tensor::from_vec(&[size, ACTIONS], pi).unwrap(),
        z: Tensor::from_vec(&[size, 1], z).unwrap(),
        masks,
    }
}

#[derive(Debug, Clone)]
pub struct TensorCheck {
    pub name: &'static str,
    pub sampled: usize,
    pub max_rel: f64,
}

/// Compares analytic gradients with central differences of step `h` on up
/// to `per_tensor` randomly chosen entries of every parameter tensor.
pub fn check_network<R: Rng>(
    net: &Network<f64>,
    batch: &Batch<f64>,
    l2: f64,
    per_tensor: usize,
    h: f64,
    rng: &mut R,
) -> Vec<TensorCheck> {
    let (_, grads) = net.loss_and_gradients(batch, l2).unwrap();
    let mut probe = net.clone();
    let mut out = Vec::new();
    for (t, name) in Architecture::PARAM_NAMES.iter().enumerate() {
        let len = net.params()[t].len();
        let picks = sample(rng, len, per_tensor.min(len));
        let mut max_rel: f64 = 0.0;
        for i in picks.iter() {
            let orig = net.params()[t].data()[i];
            probe.params_mut()[t].data_mut()[i] = orig + h;
            let plus = probe.loss(batch, l2).unwrap().total();
            probe.params_mut()[t].data_mut()[i] = orig - h;
            let minus = probe.loss(batch, l2).unwrap().total();
            probe.params_mut()[t].data_mut()[i] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            max_rel = max_rel.max(rel_error(grads[t].data()[i], numeric));
        }
        out.push(TensorCheck {
            name,
            sampled: picks.len(),
            max_rel,
        });
    }
    out
}
