//! Small tanh MLPs with explicit forward and backward passes, and Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::Action;

/// Fully connected network, tanh on hidden layers, linear output.
/// Parameters live in one flat vector: for each layer, the `out × in`
/// row-major weight matrix followed by the `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMlp")]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

impl TryFrom<RawMlp> for Mlp {
    type Error = String;

    fn try_from(raw: RawMlp) -> Result<Self, String> {
        if raw.sizes.len() < 2 || raw.sizes.contains(&0) {
            return Err(format!("invalid layer sizes {:?}", raw.sizes));
        }
        let expected: usize = raw.sizes.windows(2).map(|p| p[0] * p[1] + p[1]).sum();
        if raw.params.len() != expected {
            return Err(format!("layer sizes {:?} need {expected} parameters, found {}", raw.sizes, raw.params.len()));
        }
        Ok(Mlp { sizes: raw.sizes, params: raw.params })
    }
}

/// Layer activations from a forward pass, kept for the backward pass.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().map_or(&[], Vec::as_slice)
    }
}

impl Mlp {
    /// Glorot-uniform weights, zero biases; the output layer is scaled by
    /// `out_scale`.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], out_scale: f64, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let mut params = Vec::new();
        let layers = sizes.len() - 1;
        for (l, pair) in sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let scale = if l + 1 == layers { out_scale } else { 1.0 };
            params.extend((0..fan_in * fan_out).map(|_| rng.gen_range(-limit..=limit) * scale));
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Mlp { sizes: sizes.to_vec(), params }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        let n = sizes.windows(2).map(|p| p[0] * p[1] + p[1]).sum();
        Mlp { sizes: sizes.to_vec(), params: vec![0.0; n] }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn forward_traced(&self, input: &[f64], trace: &mut Trace) {
        debug_assert_eq!(input.len(), self.input_size());
        let layers = self.sizes.len() - 1;
        trace.acts.resize(layers + 1, Vec::new());
        trace.acts[0].clear();
        trace.acts[0].extend_from_slice(input);
        let mut offset = 0;
        for l in 0..layers {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[offset..offset + n_in * n_out];
            let b = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            let (before, after) = trace.acts.split_at_mut(l + 1);
            let x = &before[l];
            let y = &mut after[0];
            y.clear();
            for o in 0..n_out {
                let row = &w[o * n_in..(o + 1) * n_in];
                let mut z = b[o];
                for (wi, xi) in row.iter().zip(x.iter()) {
                    z += wi * xi;
                }
                y.push(if l + 1 < layers { z.tanh() } else { z });
            }
        }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut trace = Trace::default();
        self.forward_traced(input, &mut trace);
        trace.acts.pop().unwrap_or_default()
    }

    /// Accumulates `∂L/∂params` into `grad` given `∂L/∂output`.
    pub fn backward(&self, trace: &Trace, d_output: &[f64], grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.params.len());
        let layers = self.sizes.len() - 1;
        let mut offsets = Vec::with_capacity(layers);
        let mut offset = 0;
        for l in 0..layers {
            offsets.push(offset);
            offset += self.sizes[l] * self.sizes[l + 1] + self.sizes[l + 1];
        }
        let mut delta = d_output.to_vec();
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let x = &trace.acts[l];
            if l + 1 < layers {
                // through tanh: dz = dy · (1 − y²)
                for (d, y) in delta.iter_mut().zip(&trace.acts[l + 1]) {
                    *d *= 1.0 - y * y;
                }
            }
            let mut d_in = vec![0.0; n_in];
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = off + o * n_in;
                for i in 0..n_in {
                    grad[row + i] += d * x[i];
                    d_in[i] += d * self.params[row + i];
                }
                grad[off + n_in * n_out + o] += d;
            }
            delta = d_in;
        }
    }
}

/// Separate actor (action logits) and critic (state value) networks with the
/// same hidden layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub actor: Mlp,
    pub critic: Mlp,
}

impl PolicyParams {
    pub fn new<R: Rng + ?Sized>(obs_dim: usize, hidden: &[usize], n_actions: usize, rng: &mut R) -> Self {
        let mut actor_sizes = vec![obs_dim];
        actor_sizes.extend_from_slice(hidden);
        let mut critic_sizes = actor_sizes.clone();
        actor_sizes.push(n_actions);
        critic_sizes.push(1);
        PolicyParams { actor: Mlp::new(&actor_sizes, 0.01, rng), critic: Mlp::new(&critic_sizes, 1.0, rng) }
    }

    pub fn default_for_obs<R: Rng + ?Sized>(obs_dim: usize, rng: &mut R) -> Self {
        Self::new(obs_dim, &[64, 64], Action::COUNT, rng)
    }

    pub fn obs_dim(&self) -> usize {
        self.actor.input_size()
    }

    pub fn n_actions(&self) -> usize {
        self.actor.output_size()
    }

    /// Checks both networks against the expected input and action counts.
    pub fn check_shape(&self, obs_dim: usize, n_actions: usize) -> Result<(), String> {
        let (a, c) = (&self.actor, &self.critic);
        if a.input_size() != obs_dim || c.input_size() != obs_dim {
            return Err(format!(
                "networks take {} and {} inputs, observations have {obs_dim}",
                a.input_size(),
                c.input_size()
            ));
        }
        if a.output_size() != n_actions || c.output_size() != 1 {
            return Err(format!(
                "expected {n_actions} logits and 1 value, found {} and {}",
                a.output_size(),
                c.output_size()
            ));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.actor.params().iter().chain(self.critic.params()).all(|v| v.is_finite())
    }

    /// Action logits and state value.
    pub fn forward(&self, obs: &[f64]) -> (Vec<f64>, f64) {
        let logits = self.actor.forward(obs);
        let value = self.critic.forward(obs)[0];
        (logits, value)
    }

    pub fn zero_grad(&self) -> PolicyGrad {
        PolicyGrad { actor: vec![0.0; self.actor.num_params()], critic: vec![0.0; self.critic.num_params()] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGrad {
    pub actor: Vec<f64>,
    pub critic: Vec<f64>,
}

impl PolicyGrad {
    pub fn norm(&self) -> f64 {
        self.actor.iter().chain(&self.critic).map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.actor.iter().chain(&self.critic).all(|g| g.is_finite())
    }

    pub fn scale(&mut self, k: f64) {
        self.actor.iter_mut().chain(self.critic.iter_mut()).for_each(|g| *g *= k);
    }

    /// Rescales to at most `max_norm`; returns the norm before clipping.
    pub fn clip_norm(&mut self, max_norm: f64) -> f64 {
        let n = self.norm();
        if n > max_norm && n > 0.0 {
            self.scale(max_norm / n);
        }
        n
    }

    /// Clips the actor and critic gradients to `max_norm` independently, so a
    /// large value error cannot starve the policy update. Returns the joint
    /// norm before clipping.
    pub fn clip_norm_per_network(&mut self, max_norm: f64) -> f64 {
        let before = self.norm();
        for g in [&mut self.actor, &mut self.critic] {
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > max_norm && n > 0.0 {
                let k = max_norm / n;
                g.iter_mut().for_each(|v| *v *= k);
            }
        }
        before
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
    logits.iter().map(|z| z - lse).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
}

/// Adam over both networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    actor: AdamState,
    critic: AdamState,
}

impl Adam {
    pub fn new(params: &PolicyParams, lr: f64) -> Self {
        let st = |n| AdamState { m: vec![0.0; n], v: vec![0.0; n] };
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            actor: st(params.actor.num_params()),
            critic: st(params.critic.num_params()),
        }
    }

    /// Gradient-descent step on the loss whose gradient is `grad`.
    pub fn step(&mut self, params: &mut PolicyParams, grad: &PolicyGrad) {
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let update = |p: &mut [f64], g: &[f64], s: &mut AdamState| {
            for k in 0..p.len() {
                s.m[k] = b1 * s.m[k] + (1.0 - b1) * g[k];
                s.v[k] = b2 * s.v[k] + (1.0 - b2) * g[k] * g[k];
                let m_hat = s.m[k] / c1;
                let v_hat = s.v[k] / c2;
                p[k] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        };
        update(params.actor.params_mut(), &grad.actor, &mut self.actor);
        update(params.critic.params_mut(), &grad.critic, &mut self.critic);
    }
}
