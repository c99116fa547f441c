//! Clipped-surrogate PPO loss with exact gradients, and the minibatch update.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gae::compute_gae;
use super::net::{log_softmax, softmax, Adam, PolicyGrad, PolicyParams, Trace};
use super::PolicyError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub learning_rate: f64,
    pub epochs_per_update: u32,
    pub minibatch_size: usize,
    pub rollout_length: usize,
    pub entropy_coef: f64,
    pub value_coef: f64,
    /// Per-network gradient norm limit.
    pub max_grad_norm: f64,
    pub normalize_advantages: bool,
    /// Divide rewards by the running standard deviation of the discounted
    /// return before they enter the rollout.
    pub scale_rewards: bool,
    pub hidden: Vec<usize>,
    pub total_episodes: u32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            learning_rate: 3e-4,
            epochs_per_update: 4,
            minibatch_size: 64,
            rollout_length: 2048,
            entropy_coef: 0.01,
            value_coef: 0.5,
            max_grad_norm: 0.5,
            normalize_advantages: true,
            scale_rewards: true,
            hidden: vec![64, 64],
            total_episodes: 300,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let bad = |m: &str| Err(PolicyError::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gae_lambda must be in [0, 1]");
        }
        if !(self.clip_epsilon > 0.0) {
            return bad("clip_epsilon must be > 0");
        }
        if !(self.learning_rate > 0.0) || !(self.max_grad_norm > 0.0) {
            return bad("learning_rate and max_grad_norm must be > 0");
        }
        if self.epochs_per_update == 0 || self.minibatch_size == 0 || self.rollout_length == 0 {
            return bad("epochs_per_update, minibatch_size and rollout_length must be >= 1");
        }
        if self.total_episodes == 0 {
            return bad("total_episodes must be >= 1");
        }
        if self.minibatch_size > self.rollout_length {
            return bad("minibatch_size must not exceed rollout_length");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden layer sizes must be non-empty and >= 1");
        }
        Ok(())
    }
}

/// Per-step training data. Observations are stored row-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rollout {
    obs_dim: usize,
    pub obs: Vec<f64>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Rollout {
    pub fn new(obs_dim: usize) -> Self {
        Rollout { obs_dim, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn observation(&self, t: usize) -> &[f64] {
        &self.obs[t * self.obs_dim..(t + 1) * self.obs_dim]
    }

    pub fn push(&mut self, obs: &[f64], action: usize, log_prob: f64, value: f64, reward: f64, done: bool) {
        debug_assert_eq!(obs.len(), self.obs_dim);
        self.obs.extend_from_slice(obs);
        self.actions.push(action);
        self.log_probs.push(log_prob);
        self.values.push(value);
        self.rewards.push(reward);
        self.dones.push(done);
    }

    /// Fills `advantages` and `returns`.
    pub fn finish(&mut self, last_value: f64, gamma: f64, gae_lambda: f64) -> Result<(), PolicyError> {
        let (adv, ret) = compute_gae(&self.rewards, &self.values, &self.dones, last_value, gamma, gae_lambda)?;
        self.advantages = adv;
        self.returns = ret;
        Ok(())
    }

    pub fn clear(&mut self) {
        let obs_dim = self.obs_dim;
        *self = Rollout::new(obs_dim);
    }
}

/// `min(r·Â, clip(r, 1−ε, 1+ε)·Â)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    (ratio * advantage).min(clipped * advantage)
}

/// One training sample as seen by the loss.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub obs: &'a [f64],
    pub action: usize,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub ret: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LossCoefs {
    pub clip_epsilon: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
}

impl From<&TrainConfig> for LossCoefs {
    fn from(c: &TrainConfig) -> Self {
        LossCoefs { clip_epsilon: c.clip_epsilon, value_coef: c.value_coef, entropy_coef: c.entropy_coef }
    }
}

/// Minibatch means of the loss terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossStats {
    /// Mean clipped surrogate (maximized).
    pub surrogate: f64,
    /// Mean squared value error.
    pub value_loss: f64,
    pub entropy: f64,
    /// `−surrogate + value_coef·value_loss − entropy_coef·entropy`.
    pub total: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

/// Loss over `samples` and, when `grad` is given, its exact gradient
/// accumulated into it.
pub fn ppo_loss(
    params: &PolicyParams,
    samples: &[Sample<'_>],
    coefs: LossCoefs,
    mut grad: Option<&mut PolicyGrad>,
) -> LossStats {
    let n = samples.len() as f64;
    let mut stats = LossStats::default();
    let mut actor_trace = Trace::default();
    let mut critic_trace = Trace::default();
    let eps = coefs.clip_epsilon;
    for s in samples {
        params.actor.forward_traced(s.obs, &mut actor_trace);
        params.critic.forward_traced(s.obs, &mut critic_trace);
        let logits = actor_trace.output();
        let logp = log_softmax(logits);
        let probs = softmax(logits);
        let value = critic_trace.output()[0];

        let ratio = (logp[s.action] - s.old_log_prob).exp();
        let unclipped = ratio * s.advantage;
        let surrogate = clipped_surrogate(ratio, s.advantage, eps);
        let entropy: f64 = -probs.iter().zip(&logp).map(|(p, lp)| p * lp).sum::<f64>();
        let err = value - s.ret;

        stats.surrogate += surrogate / n;
        stats.value_loss += err * err / n;
        stats.entropy += entropy / n;
        stats.approx_kl += (s.old_log_prob - logp[s.action]) / n;
        if (ratio - 1.0).abs() > eps {
            stats.clip_fraction += 1.0 / n;
        }

        if let Some(g) = grad.as_deref_mut() {
            // d(surrogate)/d(log π(a)) is r·Â where the unclipped branch is
            // the minimum, and 0 where the clipped constant is.
            let d_logp = if unclipped <= surrogate { ratio * s.advantage } else { 0.0 };
            let d_logits: Vec<f64> = (0..probs.len())
                .map(|k| {
                    let onehot = if k == s.action { 1.0 } else { 0.0 };
                    let d_surr = d_logp * (onehot - probs[k]);
                    let d_ent = -probs[k] * (logp[k] + entropy);
                    (-d_surr - coefs.entropy_coef * d_ent) / n
                })
                .collect();
            params.actor.backward(&actor_trace, &d_logits, &mut g.actor);
            let d_value = 2.0 * coefs.value_coef * err / n;
            params.critic.backward(&critic_trace, &[d_value], &mut g.critic);
        }
    }
    stats.total = -stats.surrogate + coefs.value_coef * stats.value_loss - coefs.entropy_coef * stats.entropy;
    stats
}

/// Averages over all minibatches of one update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub minibatches: u32,
    pub surrogate: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub total: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub grad_norm: f64,
}

/// Runs `epochs_per_update` passes of shuffled minibatch Adam steps over a
/// finished rollout. On a non-finite gradient, parameters and optimizer state
/// are restored to their values before the call.
pub fn ppo_update<R: Rng + ?Sized>(
    params: &mut PolicyParams,
    optimizer: &mut Adam,
    rollout: &Rollout,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<UpdateStats, PolicyError> {
    let n = rollout.len();
    if rollout.advantages.len() != n || rollout.returns.len() != n {
        return Err(PolicyError::AdvantagesMissing);
    }
    if n == 0 {
        return Ok(UpdateStats::default());
    }
    let advantages = if cfg.normalize_advantages { normalized(&rollout.advantages) } else { rollout.advantages.clone() };
    let saved = (params.clone(), optimizer.clone());
    let coefs = LossCoefs::from(cfg);
    let mut order: Vec<usize> = (0..n).collect();
    let mut stats = UpdateStats::default();
    for epoch in 0..cfg.epochs_per_update {
        order.shuffle(rng);
        for (mb, chunk) in order.chunks(cfg.minibatch_size.max(1)).enumerate() {
            let samples: Vec<Sample<'_>> = chunk
                .iter()
                .map(|&t| Sample {
                    obs: rollout.observation(t),
                    action: rollout.actions[t],
                    old_log_prob: rollout.log_probs[t],
                    advantage: advantages[t],
                    ret: rollout.returns[t],
                })
                .collect();
            let mut grad = params.zero_grad();
            let loss = ppo_loss(params, &samples, coefs, Some(&mut grad));
            if !grad.is_finite() || !loss.total.is_finite() {
                *params = saved.0;
                *optimizer = saved.1;
                return Err(PolicyError::NonFiniteGradient { epoch, minibatch: mb as u32 });
            }
            let norm = grad.clip_norm_per_network(cfg.max_grad_norm);
            optimizer.step(params, &grad);
            stats.minibatches += 1;
            stats.surrogate += loss.surrogate;
            stats.value_loss += loss.value_loss;
            stats.entropy += loss.entropy;
            stats.total += loss.total;
            stats.approx_kl += loss.approx_kl;
            stats.clip_fraction += loss.clip_fraction;
            stats.grad_norm += norm;
        }
    }
    let k = f64::from(stats.minibatches);
    for v in [
        &mut stats.surrogate,
        &mut stats.value_loss,
        &mut stats.entropy,
        &mut stats.total,
        &mut stats.approx_kl,
        &mut stats.clip_fraction,
        &mut stats.grad_norm,
    ] {
        *v /= k;
    }
    Ok(stats)
}

fn normalized(xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    xs.iter().map(|x| (x - mean) / (std + 1e-8)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn surrogate_points() {
        assert_eq!(clipped_surrogate(1.5, 2.0, 0.2), 2.4);
        assert_eq!(clipped_surrogate(0.5, -1.0, 0.2), -0.8);
        for eps in [0.01, 0.2, 0.9] {
            assert_eq!(clipped_surrogate(1.0, -3.7, eps), -3.7);
        }
    }

    #[test]
    fn normalized_has_zero_mean_unit_std() {
        let v = normalized(&[1.0, 2.0, 3.0, 10.0]);
        let mean: f64 = v.iter().sum::<f64>() / 4.0;
        let var: f64 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = [
            TrainConfig { gamma: 1.5, ..Default::default() },
            TrainConfig { clip_epsilon: 0.0, ..Default::default() },
            TrainConfig { minibatch_size: 0, ..Default::default() },
            TrainConfig { minibatch_size: 4096, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    proptest! {
        #[test]
        fn surrogate_bounded_by_scaled_abs_advantage(
            pairs in proptest::collection::vec((0.0f64..5.0, -10.0f64..10.0), 1..64),
            eps in 0.01f64..0.5,
        ) {
            let n = pairs.len() as f64;
            let mean_surr: f64 = pairs.iter().map(|&(r, a)| clipped_surrogate(r, a, eps)).sum::<f64>() / n;
            let mean_abs: f64 = pairs.iter().map(|&(_, a)| a.abs()).sum::<f64>() / n;
            prop_assert!(mean_surr <= mean_abs * (1.0 + eps) + 1e-12);
        }
    }
}
