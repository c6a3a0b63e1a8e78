use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{NeuralError, Real, Tensor};

/// Side of the padded square input.
pub const BOARD: usize = 12;
/// Input planes: side-to-move tokens, opponent tokens, on-board mask.
pub const IN_PLANES: usize = 3;
/// Policy outputs, one per possible column.
pub const ACTIONS: usize = 12;
pub const INPUT_LEN: usize = BOARD * BOARD * IN_PLANES;
const CELLS: usize = BOARD * BOARD;

const CONV1_W: usize = 0;
const CONV1_B: usize = 1;
const CONV2_W: usize = 2;
const CONV2_B: usize = 3;
const FC_W: usize = 4;
const FC_B: usize = 5;
const POLICY_W: usize = 6;
const POLICY_B: usize = 7;
const VALUE_W: usize = 8;
const VALUE_B: usize = 9;
const PARAM_TENSORS: usize = 10;

/// Widths of the two convolutions and the dense trunk.
///
/// Layout: conv 3×3 (3 → filters) · ReLU · conv 3×3 (filters → filters) ·
/// ReLU · flatten · dense (→ hidden) · ReLU, then a policy head (dense → 12
/// logits) and a value head (dense → 1, tanh).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub filters: usize,
    pub hidden: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            filters: 32,
            hidden: 256,
        }
    }
}

impl Architecture {
    pub const PARAM_NAMES: [&'static str; PARAM_TENSORS] = [
        "conv1.weight",
        "conv1.bias",
        "conv2.weight",
        "conv2.bias",
        "trunk.weight",
        "trunk.bias",
        "policy.weight",
        "policy.bias",
        "value.weight",
        "value.bias",
    ];

    /// Shapes of the parameter tensors, in storage order. Convolution weights
    /// are `[ky, kx, in, out]` and dense weights `[in, out]`.
    pub fn shapes(&self) -> Vec<Vec<usize>> {
        let (f, h) = (self.filters, self.hidden);
        vec![
            vec![3, 3, IN_PLANES, f],
            vec![f],
            vec![3, 3, f, f],
            vec![f],
            vec![CELLS * f, h],
            vec![h],
            vec![h, ACTIONS],
            vec![ACTIONS],
            vec![h, 1],
            vec![1],
        ]
    }

    pub fn param_count(&self) -> usize {
        self.shapes().iter().map(|s| s.iter().product::<usize>()).sum()
    }
}

/// `out[o] = b[o] + Σ_i x[i]·w[i, o]` with `w` stored `[in, out]`.
pub fn dense_forward<F: Real>(x: &[F], w: &[F], b: &[F], out: &mut [F]) {
    let n_out = b.len();
    debug_assert_eq!(w.len(), x.len() * n_out);
    out.copy_from_slice(b);
    for (i, &xi) in x.iter().enumerate() {
        if xi == F::zero() {
            continue;
        }
        let row = &w[i * n_out..(i + 1) * n_out];
        for (o, &wv) in out.iter_mut().zip(row) {
            *o = *o + xi * wv;
        }
    }
}

/// Accumulates parameter gradients of a dense layer into `gw`/`gb` and, when
/// requested, writes the input gradient into `dx`.
pub fn dense_backward<F: Real>(x: &[F], w: &[F], dout: &[F], gw: &mut [F], gb: &mut [F], dx: Option<&mut [F]>) {
    let n_out = dout.len();
    for (g, &d) in gb.iter_mut().zip(dout) {
        *g = *g + d;
    }
    for (i, &xi) in x.iter().enumerate() {
        if xi == F::zero() {
            continue;
        }
        let grow = &mut gw[i * n_out..(i + 1) * n_out];
        for (g, &d) in grow.iter_mut().zip(dout) {
            *g = *g + xi * d;
        }
    }
    if let Some(dx) = dx {
        for (i, d_in) in dx.iter_mut().enumerate() {
            let row = &w[i * n_out..(i + 1) * n_out];
            *d_in = row.iter().zip(dout).map(|(&wv, &d)| wv * d).sum();
        }
    }
}

#[inline]
fn neighbours(pos: usize) -> impl Iterator<Item = (usize, usize)> {
    // (kernel offset, input position) pairs along one axis, zero padding
    (0..3).filter_map(move |k| {
        let p = pos as isize + k as isize - 1;
        (p >= 0 && (p as usize) < BOARD).then_some((k, p as usize))
    })
}

/// 3×3 same-padded convolution over a `BOARD × BOARD × cin` input stored
/// height-width-channel. Weights are `[ky, kx, cin, cout]`.
pub fn conv3x3_forward<F: Real>(input: &[F], cin: usize, w: &[F], b: &[F], out: &mut [F]) {
    let cout = b.len();
    for y in 0..BOARD {
        for x in 0..BOARD {
            let o = &mut out[(y * BOARD + x) * cout..][..cout];
            o.copy_from_slice(b);
            for (ky, iy) in neighbours(y) {
                for (kx, ix) in neighbours(x) {
                    let inp = &input[(iy * BOARD + ix) * cin..][..cin];
                    let wbase = (ky * 3 + kx) * cin * cout;
                    for (ci, &a) in inp.iter().enumerate() {
                        if a == F::zero() {
                            continue;
                        }
                        let wrow = &w[wbase + ci * cout..][..cout];
                        for (ov, &wv) in o.iter_mut().zip(wrow) {
                            *ov = *ov + a * wv;
                        }
                    }
                }
            }
        }
    }
}

/// Backward pass of [`conv3x3_forward`]; accumulates into `gw`, `gb` and,
/// when given, `din` (which must start zeroed).
pub fn conv3x3_backward<F: Real>(
    input: &[F],
    cin: usize,
    w: &[F],
    dout: &[F],
    gw: &mut [F],
    gb: &mut [F],
    mut din: Option<&mut [F]>,
) {
    let cout = gb.len();
    for y in 0..BOARD {
        for x in 0..BOARD {
            let d = &dout[(y * BOARD + x) * cout..][..cout];
            if d.iter().all(|&v| v == F::zero()) {
                continue;
            }
            for (g, &dv) in gb.iter_mut().zip(d) {
                *g = *g + dv;
            }
            for (ky, iy) in neighbours(y) {
                for (kx, ix) in neighbours(x) {
                    let in_base = (iy * BOARD + ix) * cin;
                    let wbase = (ky * 3 + kx) * cin * cout;
                    for ci in 0..cin {
                        let a = input[in_base + ci];
                        if a != F::zero() {
                            let grow = &mut gw[wbase + ci * cout..][..cout];
                            for (g, &dv) in grow.iter_mut().zip(d) {
                                *g = *g + a * dv;
                            }
                        }
                        if let Some(din) = din.as_deref_mut() {
                            let wrow = &w[wbase + ci * cout..][..cout];
                            let s: F = wrow.iter().zip(d).map(|(&wv, &dv)| wv * dv).sum();
                            din[in_base + ci] = din[in_base + ci] + s;
                        }
                    }
                }
            }
        }
    }
}

fn relu_in_place<F: Real>(v: &mut [F]) {
    for x in v {
        if *x < F::zero() {
            *x = F::zero();
        }
    }
}

/// Softmax over the entries where `mask` is true; masked entries get exactly
/// zero probability.
pub fn masked_softmax<F: Real>(logits: &[F], mask: &[bool]) -> Vec<F> {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&l, _)| l)
        .fold(F::neg_infinity(), F::max);
    let mut out: Vec<F> = logits
        .iter()
        .zip(mask)
        .map(|(&l, &m)| if m { (l - max).exp() } else { F::zero() })
        .collect();
    let total: F = out.iter().copied().sum();
    for p in &mut out {
        *p = *p / total;
    }
    out
}

/// Loss terms averaged over a batch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossParts {
    /// Mean squared value error.
    pub value: f64,
    /// Mean policy cross-entropy.
    pub policy: f64,
    /// Weight penalty (zero unless requested).
    pub l2: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.value + self.policy + self.l2
    }
}

fn check_targets<F: Real>(pi: &[F], z: F, mask: &[bool]) -> Result<(), NeuralError> {
    if !mask.iter().any(|&m| m) {
        return Err(NeuralError::InvalidTarget("no legal action".into()));
    }
    let mut sum = 0.0;
    for (a, (&p, &m)) in pi.iter().zip(mask).enumerate() {
        let p = p.as_f64();
        if !(p >= 0.0 && p.is_finite()) {
            return Err(NeuralError::InvalidTarget(format!("pi[{a}] = {p}")));
        }
        if p > 0.0 && !m {
            return Err(NeuralError::InvalidTarget(format!("pi has mass {p} on illegal column {a}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-4 {
        return Err(NeuralError::InvalidTarget(format!("pi sums to {sum}")));
    }
    let z = z.as_f64();
    if !(-1.0..=1.0).contains(&z) {
        return Err(NeuralError::InvalidTarget(format!("z = {z}")));
    }
    Ok(())
}

/// Per-example loss `(v − z)² − Σ π·log softmax_masked(logits)` and its
/// gradients with respect to the logits and the (post-tanh) value.
fn example_loss<F: Real>(logits: &[F], v: F, pi: &[F], z: F, mask: &[bool]) -> (F, F, [F; ACTIONS], F) {
    let probs = masked_softmax(logits, mask);
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&l, _)| l)
        .fold(F::neg_infinity(), F::max);
    let log_norm = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&l, _)| (l - max).exp())
        .sum::<F>()
        .ln()
        + max;
    let mut ce = F::zero();
    let mut dlogits = [F::zero(); ACTIONS];
    for a in 0..logits.len() {
        if pi[a] > F::zero() {
            ce = ce - pi[a] * (logits[a] - log_norm);
        }
        if mask[a] {
            dlogits[a] = probs[a] - pi[a];
        }
    }
    let diff = v - z;
    (diff * diff, ce, dlogits, F::from_f64(2.0) * diff)
}

/// Mean combined loss over a batch of network outputs. `logits` is
/// `[batch, 12]`, `values`, `z` are `[batch, 1]`, `pi` is `[batch, 12]`.
pub fn loss<F: Real>(
    logits: &Tensor<F>,
    values: &Tensor<F>,
    pi: &Tensor<F>,
    z: &Tensor<F>,
    masks: &[[bool; ACTIONS]],
) -> Result<LossParts, NeuralError> {
    let batch = masks.len();
    logits.check_shape(&[batch, ACTIONS])?;
    pi.check_shape(&[batch, ACTIONS])?;
    values.check_shape(&[batch, 1])?;
    z.check_shape(&[batch, 1])?;
    let mut parts = LossParts::default();
    for i in 0..batch {
        let p = &pi.data()[i * ACTIONS..][..ACTIONS];
        check_targets(p, z.data()[i], &masks[i])?;
        let (mse, ce, _, _) = example_loss(&logits.data()[i * ACTIONS..][..ACTIONS], values.data()[i], p, z.data()[i], &masks[i]);
        parts.value += mse.as_f64();
        parts.policy += ce.as_f64();
    }
    let n = batch.max(1) as f64;
    parts.value /= n;
    parts.policy /= n;
    Ok(parts)
}

/// Training examples in network layout.
#[derive(Debug, Clone)]
pub struct Batch<F> {
    /// `[batch, 12, 12, 3]`
    pub states: Tensor<F>,
    /// `[batch, 12]`
    pub pi: Tensor<F>,
    /// `[batch, 1]`
    pub z: Tensor<F>,
    pub masks: Vec<[bool; ACTIONS]>,
}

impl<F: Real> Batch<F> {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    fn validate(&self) -> Result<(), NeuralError> {
        let b = self.len();
        self.states.check_shape(&[b, BOARD, BOARD, IN_PLANES])?;
        self.pi.check_shape(&[b, ACTIONS])?;
        self.z.check_shape(&[b, 1])?;
        for i in 0..b {
            check_targets(&self.pi.data()[i * ACTIONS..][..ACTIONS], self.z.data()[i], &self.masks[i])?;
        }
        Ok(())
    }
}

struct Activations<F> {
    a1: Vec<F>,
    a2: Vec<F>,
    hidden: Vec<F>,
    logits: [F; ACTIONS],
    value: F,
}

/// Policy/value network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<F> {
    arch: Architecture,
    params: Vec<Tensor<F>>,
}

impl<F: Real> Network<F> {
    /// He-initialized trunk, small Gaussian heads, zero biases.
    pub fn new<R: Rng>(arch: Architecture, rng: &mut R) -> Self {
        let shapes = arch.shapes();
        let params = shapes
            .iter()
            .enumerate()
            .map(|(i, shape)| {
                let mut t = Tensor::zeros(shape);
                if shape.len() > 1 {
                    let fan_in: usize = shape[..shape.len() - 1].iter().product();
                    let gain = if i == POLICY_W || i == VALUE_W { 1.0 } else { 2.0 };
                    let normal = Normal::new(0.0, (gain / fan_in as f64).sqrt()).expect("valid std");
                    for v in t.data_mut() {
                        *v = F::from_f64(normal.sample(rng));
                    }
                }
                t
            })
            .collect();
        Network { arch, params }
    }

    pub fn from_params(arch: Architecture, params: Vec<Tensor<F>>) -> Result<Self, NeuralError> {
        let shapes = arch.shapes();
        if params.len() != shapes.len() {
            return Err(NeuralError::ShapeMismatch {
                expected: vec![shapes.len()],
                actual: vec![params.len()],
            });
        }
        for (p, s) in params.iter().zip(&shapes) {
            p.check_shape(s)?;
        }
        Ok(Network { arch, params })
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn params(&self) -> &[Tensor<F>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor<F>] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(Tensor::is_finite)
    }

    /// Zeroes both heads, so every input maps to uniform logits and value 0.
    pub fn zero_heads(&mut self) {
        for i in [POLICY_W, POLICY_B, VALUE_W, VALUE_B] {
            self.params[i].fill(F::zero());
        }
    }

    pub fn cast<G: Real>(&self) -> Network<G> {
        Network {
            arch: self.arch,
            params: self.params.iter().map(Tensor::cast).collect(),
        }
    }

    fn activations(&self, input: &[F]) -> Activations<F> {
        let (f, h) = (self.arch.filters, self.arch.hidden);
        let p = &self.params;
        let mut a1 = vec![F::zero(); CELLS * f];
        conv3x3_forward(input, IN_PLANES, p[CONV1_W].data(), p[CONV1_B].data(), &mut a1);
        relu_in_place(&mut a1);
        let mut a2 = vec![F::zero(); CELLS * f];
        conv3x3_forward(&a1, f, p[CONV2_W].data(), p[CONV2_B].data(), &mut a2);
        relu_in_place(&mut a2);
        let mut hidden = vec![F::zero(); h];
        dense_forward(&a2, p[FC_W].data(), p[FC_B].data(), &mut hidden);
        relu_in_place(&mut hidden);
        let mut logits = [F::zero(); ACTIONS];
        dense_forward(&hidden, p[POLICY_W].data(), p[POLICY_B].data(), &mut logits);
        let mut v = [F::zero()];
        dense_forward(&hidden, p[VALUE_W].data(), p[VALUE_B].data(), &mut v);
        Activations {
            a1,
            a2,
            hidden,
            logits,
            value: v[0].tanh(),
        }
    }

    /// Logits and value for one encoded state of length [`INPUT_LEN`].
    pub fn predict(&self, state: &[F]) -> Result<([F; ACTIONS], F), NeuralError> {
        if state.len() != INPUT_LEN {
            return Err(NeuralError::ShapeMismatch {
                expected: vec![BOARD, BOARD, IN_PLANES],
                actual: vec![state.len()],
            });
        }
        let act = self.activations(state);
        Ok((act.logits, act.value))
    }

    /// Batched forward pass: `[batch, 12, 12, 3]` in, `([batch, 12] logits,
    /// [batch, 1] values)` out.
    pub fn forward(&self, states: &Tensor<F>) -> Result<(Tensor<F>, Tensor<F>), NeuralError> {
        let batch = match states.shape() {
            [b, BOARD, BOARD, IN_PLANES] => *b,
            _ => {
                return Err(NeuralError::ShapeMismatch {
                    expected: vec![0, BOARD, BOARD, IN_PLANES],
                    actual: states.shape().to_vec(),
                })
            }
        };
        let mut logits = Vec::with_capacity(batch * ACTIONS);
        let mut values = Vec::with_capacity(batch);
        for state in states.data().chunks_exact(INPUT_LEN) {
            let act = self.activations(state);
            logits.extend_from_slice(&act.logits);
            values.push(act.value);
        }
        Ok((Tensor::from_vec(&[batch, ACTIONS], logits)?, Tensor::from_vec(&[batch, 1], values)?))
    }

    fn l2_penalty(&self, l2: F) -> F {
        if l2 == F::zero() {
            return F::zero();
        }
        let sum: F = [CONV1_W, CONV2_W, FC_W, POLICY_W, VALUE_W]
            .iter()
            .map(|&i| self.params[i].data().iter().map(|&w| w * w).sum::<F>())
            .sum();
        l2 * sum
    }

    /// Batch loss without gradients, including the `l2` weight penalty.
    pub fn loss(&self, batch: &Batch<F>, l2: F) -> Result<LossParts, NeuralError> {
        let (logits, values) = self.forward(&batch.states)?;
        let mut parts = loss(&logits, &values, &batch.pi, &batch.z, &batch.masks)?;
        parts.l2 = self.l2_penalty(l2).as_f64();
        Ok(parts)
    }

    /// Loss and its exact gradient with respect to every parameter tensor.
    pub fn loss_and_gradients(&self, batch: &Batch<F>, l2: F) -> Result<(LossParts, Vec<Tensor<F>>), NeuralError> {
        batch.validate()?;
        let (f, h) = (self.arch.filters, self.arch.hidden);
        let p = &self.params;
        let mut grads: Vec<Tensor<F>> = p.iter().map(|t| Tensor::zeros(t.shape())).collect();
        let mut parts = LossParts::default();
        let n = batch.len();
        let scale = F::one() / F::from_f64(n.max(1) as f64);

        let mut d_hidden = vec![F::zero(); h];
        let mut d_tmp = vec![F::zero(); h];
        let mut d_a2 = vec![F::zero(); CELLS * f];
        let mut d_a1 = vec![F::zero(); CELLS * f];
        for i in 0..n {
            let input = &batch.states.data()[i * INPUT_LEN..][..INPUT_LEN];
            let pi = &batch.pi.data()[i * ACTIONS..][..ACTIONS];
            let z = batch.z.data()[i];
            let act = self.activations(input);
            let (mse, ce, mut d_logits, d_value) = example_loss(&act.logits, act.value, pi, z, &batch.masks[i]);
            parts.value += mse.as_f64();
            parts.policy += ce.as_f64();

            for d in &mut d_logits {
                *d = *d * scale;
            }
            // through tanh
            let d_pre_value = [d_value * scale * (F::one() - act.value * act.value)];

            let (head, rest) = grads.split_at_mut(POLICY_B);
            dense_backward(&act.hidden, p[POLICY_W].data(), &d_logits, head[POLICY_W].data_mut(), rest[0].data_mut(), Some(&mut d_hidden));
            let (head, rest) = grads.split_at_mut(VALUE_B);
            dense_backward(&act.hidden, p[VALUE_W].data(), &d_pre_value, head[VALUE_W].data_mut(), rest[0].data_mut(), Some(&mut d_tmp));
            for ((d, &t), &a) in d_hidden.iter_mut().zip(&d_tmp).zip(&act.hidden) {
                *d = if a > F::zero() { *d + t } else { F::zero() };
            }

            let (head, rest) = grads.split_at_mut(FC_B);
            dense_backward(&act.a2, p[FC_W].data(), &d_hidden, head[FC_W].data_mut(), rest[0].data_mut(), Some(&mut d_a2));
            for (d, &a) in d_a2.iter_mut().zip(&act.a2) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }

            d_a1.iter_mut().for_each(|d| *d = F::zero());
            let (head, rest) = grads.split_at_mut(CONV2_B);
            conv3x3_backward(&act.a1, f, p[CONV2_W].data(), &d_a2, head[CONV2_W].data_mut(), rest[0].data_mut(), Some(&mut d_a1));
            for (d, &a) in d_a1.iter_mut().zip(&act.a1) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }

            let (head, rest) = grads.split_at_mut(CONV1_B);
            conv3x3_backward(input, IN_PLANES, p[CONV1_W].data(), &d_a1, head[CONV1_W].data_mut(), rest[0].data_mut(), None);
        }
        let nf = n.max(1) as f64;
        parts.value /= nf;
        parts.policy /= nf;

        if l2 != F::zero() {
            parts.l2 = self.l2_penalty(l2).as_f64();
            let two_l2 = l2 + l2;
            for i in [CONV1_W, CONV2_W, FC_W, POLICY_W, VALUE_W] {
                for (g, &w) in grads[i].data_mut().iter_mut().zip(p[i].data()) {
                    *g = *g + two_l2 * w;
                }
            }
        }
        Ok((parts, grads))
    }
}
