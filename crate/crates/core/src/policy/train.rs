//! Episode loop tying the environment, advisor, reward and PPO together.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisor::{AdviceQuery, Advisor};
use crate::env::{episode_seed, Action, Env, EnvConfig, EnvError, UavState};
use crate::eval::{EpisodeMetrics, InvalidBattery};
use crate::pare::{build_prompt, llm_shaping, Advice, AlignmentParams};
use crate::reward::{compute_reward, RewardInputs, RewardWeights};
use crate::trajectory::{TrajectoryRecord, TrajectorySink};

use super::net::{log_softmax, softmax, Adam, PolicyParams};
use super::obs::{encode_observation, OBS_DIM};
use super::ppo::{ppo_update, Rollout, TrainConfig, UpdateStats};
use super::PolicyError;

/// Seed stream for training episode layouts.
pub const TRAIN_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "pirl")]
    Pirl,
    #[serde(rename = "ppo-sr")]
    PpoSr,
    #[serde(rename = "ppo-ewri")]
    PpoEwri,
    #[serde(rename = "llm-only")]
    LlmOnly,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pirl, Method::PpoSr, Method::PpoEwri, Method::LlmOnly];

    pub fn id(self) -> &'static str {
        match self {
            Method::Pirl => "pirl",
            Method::PpoSr => "ppo-sr",
            Method::PpoEwri => "ppo-ewri",
            Method::LlmOnly => "llm-only",
        }
    }

    /// Display name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Method::Pirl => "PIRL",
            Method::PpoSr => "PPO-SR",
            Method::PpoEwri => "PPO-EWRI",
            Method::LlmOnly => "LLM-only",
        }
    }

    pub fn is_trainable(self) -> bool {
        self != Method::LlmOnly
    }

    pub fn queries_advisor(self) -> bool {
        matches!(self, Method::Pirl | Method::LlmOnly)
    }

    /// Reward weights for one episode.
    pub fn episode_weights(self, rng: &mut ChaCha8Rng) -> RewardWeights {
        match self {
            Method::Pirl => RewardWeights::sample_ewri(rng),
            Method::PpoEwri => RewardWeights::sample_ewri(rng).without_llm(),
            Method::PpoSr => RewardWeights::midpoint().without_llm(),
            Method::LlmOnly => RewardWeights::midpoint(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.id().eq_ignore_ascii_case(s) || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method {s:?} (expected pirl, ppo-sr, ppo-ewri or llm-only)"))
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("method {0} has no trainable policy")]
    NotTrainable(Method),
    #[error("method {0} needs an advisor")]
    AdvisorRequired(Method),
    #[error("episode {episode}: {source}")]
    Env { episode: u32, source: EnvError },
    #[error("episode {episode}: {source}")]
    Policy { episode: u32, source: PolicyError },
    #[error("episode {episode}: {source}")]
    Metrics { episode: u32, source: InvalidBattery },
    #[error(transparent)]
    Config(#[from] PolicyError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("trajectory log: {0}")]
    Io(#[from] std::io::Error),
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: u32,
    pub method: Method,
    pub seed: u64,
    pub steps: u32,
    pub total_reward: f64,
    pub mean_reward: f64,
    pub vcr: f64,
    pub be: f64,
    pub rvc: f64,
    pub collisions: u32,
    pub advisor_calls: u32,
    pub advisor_failures: u32,
    /// Updates applied so far.
    pub updates: u32,
    /// Stats of the last update that ran during this episode.
    pub loss: Option<UpdateStats>,
}

/// Running standard deviation of the discounted return, used to put rewards
/// of very different magnitudes on a common scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReturnScaler {
    ret: f64,
    count: u64,
    mean: f64,
    m2: f64,
}

impl ReturnScaler {
    pub fn std(&self) -> f64 {
        if self.count < 2 {
            1.0
        } else {
            (self.m2 / self.count as f64).sqrt()
        }
    }

    /// Folds `reward` into the running return and returns it rescaled.
    pub fn scale(&mut self, reward: f64, gamma: f64, done: bool) -> f64 {
        self.ret = self.ret * gamma + reward;
        self.count += 1;
        let d = self.ret - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (self.ret - self.mean);
        if done {
            self.ret = 0.0;
        }
        reward / (self.std() + 1e-8)
    }
}

/// Serializable training state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub method: Method,
    pub train_config: TrainConfig,
    pub env_config: EnvConfig,
    pub alignment: AlignmentParams,
    pub obs_dim: usize,
    pub params: PolicyParams,
    pub optimizer: Adam,
    pub rng: ChaCha8Rng,
    pub return_scaler: ReturnScaler,
    /// Episodes completed.
    pub episode: u32,
}

impl Checkpoint {
    pub const FORMAT_VERSION: u32 = 1;

    /// Rejects checkpoints from another format version or built for a
    /// different observation length or action set.
    pub fn check_compatible(&self) -> Result<(), String> {
        if self.format_version != Self::FORMAT_VERSION {
            return Err(format!(
                "checkpoint format version {} is not supported (expected {})",
                self.format_version,
                Self::FORMAT_VERSION
            ));
        }
        if self.obs_dim != OBS_DIM {
            return Err(format!("checkpoint observation length {} does not match {OBS_DIM}", self.obs_dim));
        }
        self.params.check_shape(OBS_DIM, Action::COUNT)
    }
}

/// Samples from the softmax policy; returns the action and its log-probability.
pub fn sample_action(logits: &[f64], rng: &mut ChaCha8Rng) -> (usize, f64) {
    let probs = softmax(logits);
    let dist = WeightedIndex::new(&probs).expect("softmax yields a valid distribution");
    let a = dist.sample(rng);
    (a, log_softmax(logits)[a])
}

pub struct Trainer<'a> {
    method: Method,
    env_config: EnvConfig,
    cfg: TrainConfig,
    alignment: AlignmentParams,
    advisor: Option<&'a dyn Advisor>,
    params: PolicyParams,
    optimizer: Adam,
    rng: ChaCha8Rng,
    rollout: Rollout,
    scaler: ReturnScaler,
    episode: u32,
    updates: u32,
}

impl<'a> Trainer<'a> {
    pub fn new(
        method: Method,
        env_config: EnvConfig,
        cfg: TrainConfig,
        alignment: AlignmentParams,
        advisor: Option<&'a dyn Advisor>,
    ) -> Result<Self, TrainError> {
        Self::check(method, &env_config, &cfg, &alignment, advisor)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params = PolicyParams::new(OBS_DIM, &cfg.hidden, Action::COUNT, &mut rng);
        let optimizer = Adam::new(&params, cfg.learning_rate);
        Ok(Trainer {
            method,
            env_config,
            cfg,
            alignment,
            advisor,
            params,
            optimizer,
            rng,
            rollout: Rollout::new(OBS_DIM),
            scaler: ReturnScaler::default(),
            episode: 0,
            updates: 0,
        })
    }

    /// Continues from a checkpoint; `total_episodes` comes from `cfg`.
    pub fn resume(ckpt: Checkpoint, total_episodes: u32, advisor: Option<&'a dyn Advisor>) -> Result<Self, TrainError> {
        ckpt.check_compatible().map_err(TrainError::Invalid)?;
        let cfg = TrainConfig { total_episodes, ..ckpt.train_config };
        Self::check(ckpt.method, &ckpt.env_config, &cfg, &ckpt.alignment, advisor)?;
        Ok(Trainer {
            method: ckpt.method,
            env_config: ckpt.env_config,
            cfg,
            alignment: ckpt.alignment,
            advisor,
            params: ckpt.params,
            optimizer: ckpt.optimizer,
            rng: ckpt.rng,
            rollout: Rollout::new(OBS_DIM),
            scaler: ckpt.return_scaler,
            episode: ckpt.episode,
            updates: 0,
        })
    }

    fn check(
        method: Method,
        env_config: &EnvConfig,
        cfg: &TrainConfig,
        alignment: &AlignmentParams,
        advisor: Option<&dyn Advisor>,
    ) -> Result<(), TrainError> {
        if !method.is_trainable() {
            return Err(TrainError::NotTrainable(method));
        }
        if method.queries_advisor() && advisor.is_none() {
            return Err(TrainError::AdvisorRequired(method));
        }
        cfg.validate()?;
        alignment.validate().map_err(TrainError::Invalid)?;
        env_config.validate().map_err(|e| TrainError::Invalid(e.to_string()))
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }

    pub fn episodes_done(&self) -> u32 {
        self.episode
    }

    pub fn is_finished(&self) -> bool {
        self.episode >= self.cfg.total_episodes
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format_version: Checkpoint::FORMAT_VERSION,
            method: self.method,
            train_config: self.cfg.clone(),
            env_config: self.env_config.clone(),
            alignment: self.alignment,
            obs_dim: OBS_DIM,
            params: self.params.clone(),
            optimizer: self.optimizer.clone(),
            rng: self.rng.clone(),
            return_scaler: self.scaler.clone(),
            episode: self.episode,
        }
    }

    /// Runs all remaining episodes, then applies a final update to any
    /// partially filled rollout.
    pub fn run(
        &mut self,
        log: &mut dyn FnMut(&EpisodeLog) -> std::io::Result<()>,
        trajectory: &mut dyn TrajectorySink,
    ) -> Result<(), TrainError> {
        while !self.is_finished() {
            let entry = self.run_episode(trajectory)?;
            log(&entry)?;
        }
        self.finish()
    }

    /// Applies a last update to whatever the rollout holds. Call once after
    /// driving [`Trainer::run_episode`] by hand.
    pub fn finish(&mut self) -> Result<(), TrainError> {
        self.flush_rollout(0.0).map(|_| ())
    }

    fn flush_rollout(&mut self, last_value: f64) -> Result<Option<UpdateStats>, TrainError> {
        if self.rollout.is_empty() {
            return Ok(None);
        }
        let episode = self.episode;
        let wrap = |source| TrainError::Policy { episode, source };
        self.rollout.finish(last_value, self.cfg.gamma, self.cfg.gae_lambda).map_err(wrap)?;
        let stats =
            ppo_update(&mut self.params, &mut self.optimizer, &self.rollout, &self.cfg, &mut self.rng).map_err(wrap)?;
        self.rollout.clear();
        self.updates += 1;
        Ok(Some(stats))
    }

    pub fn run_episode(&mut self, trajectory: &mut dyn TrajectorySink) -> Result<EpisodeLog, TrainError> {
        let episode = self.episode;
        let seed = episode_seed(self.cfg.seed, TRAIN_STREAM, u64::from(episode));
        let env_err = |source| TrainError::Env { episode, source };
        let mut env = Env::reset(&self.env_config, seed).map_err(env_err)?;
        let weights = self.method.episode_weights(&mut self.rng);
        let dims = env.dims();
        let start = *env.state();
        trajectory.record(&TrajectoryRecord::EpisodeStart {
            method: self.method.id().to_string(),
            episode,
            seed,
            dims,
            max_steps: self.env_config.max_steps,
            obstacles: env.obstacles().to_vec(),
            start,
            weights,
        })?;

        let mut total_reward = 0.0;
        let mut collisions = 0;
        let mut advisor_calls = 0;
        let mut advisor_failures = 0;
        let mut loss = None;
        while !env.is_done() {
            let state = *env.state();
            let advice = if self.method.queries_advisor() {
                advisor_calls += 1;
                let advice = query_advisor(self.advisor.expect("checked at construction"), &env);
                advisor_failures += u32::from(advice.is_none());
                advice
            } else {
                None
            };
            let obs = encode_observation(&state, env.coverage(), env.obstacles(), dims);
            let (logits, value) = self.params.forward(&obs);
            let (a, log_prob) = sample_action(&logits, &mut self.rng);
            let action = Action::from_index(a).expect("policy head has one logit per action");

            let covered_before = env.coverage().covered_count();
            let events = env.step(action).map_err(env_err)?;
            let next = *env.state();
            let shaping = advice.map_or(0.0, |adv| shaping_term(&self.alignment, dims, &state, &next, &adv));
            let reward = compute_reward(
                &weights,
                &RewardInputs {
                    events: &events,
                    covered_before,
                    covered_after: env.coverage().covered_count(),
                    total_cells: env.coverage().total_cells(),
                    camera_action: action.is_camera(),
                    llm_shaping: shaping,
                },
            );
            total_reward += reward.total;
            collisions += u32::from(events.collision);
            let done = env.is_done();
            let learn_reward =
                if self.cfg.scale_rewards { self.scaler.scale(reward.total, self.cfg.gamma, done) } else { reward.total };
            self.rollout.push(&obs, a, log_prob, value, learn_reward, done);
            trajectory.record(&TrajectoryRecord::Step {
                episode,
                step: env.steps_taken() - 1,
                state,
                action: Some(action),
                next_state: next,
                events,
                reward,
                advice,
            })?;

            if self.rollout.len() >= self.cfg.rollout_length {
                let last_value = if done {
                    0.0
                } else {
                    let next_obs = encode_observation(&next, env.coverage(), env.obstacles(), dims);
                    self.params.forward(&next_obs).1
                };
                loss = self.flush_rollout(last_value)?.or(loss);
            }
        }

        let metrics = EpisodeMetrics::from_coverage(
            episode,
            seed,
            env.coverage(),
            env.steps_taken(),
            start.battery,
            env.state().battery,
            collisions,
        )
        .map_err(|source| TrainError::Metrics { episode, source })?;
        trajectory.record(&TrajectoryRecord::EpisodeEnd { episode, metrics: metrics.clone() })?;
        self.episode += 1;
        let steps = env.steps_taken();
        Ok(EpisodeLog {
            episode,
            method: self.method,
            seed,
            steps,
            total_reward,
            mean_reward: if steps > 0 { total_reward / f64::from(steps) } else { 0.0 },
            vcr: metrics.vcr,
            be: metrics.be,
            rvc: metrics.rvc,
            collisions,
            advisor_calls,
            advisor_failures,
            updates: self.updates,
            loss,
        })
    }
}

/// Asks the advisor about the current situation. Any failure yields `None`,
/// which callers treat as "no shaping this step".
pub fn query_advisor(advisor: &dyn Advisor, env: &Env) -> Option<Advice> {
    let state = env.state();
    let coverage = env.coverage();
    let prompt = if advisor.needs_prompt() {
        build_prompt(state, coverage.fraction(), env.dims(), env.obstacles())
    } else {
        String::new()
    };
    let query = AdviceQuery { prompt: &prompt, state, coverage, obstacles: env.obstacles(), dims: env.dims() };
    advisor.advise(&query).ok().map(|r| r.advice)
}

pub fn shaping_term(
    alignment: &AlignmentParams,
    dims: crate::env::GridDims,
    prev: &UavState,
    next: &UavState,
    advice: &Advice,
) -> f64 {
    llm_shaping(alignment, dims, prev, next, advice).total
}

/// Trains a policy from scratch with `cfg.total_episodes` episodes.
pub fn train(
    method: Method,
    env_config: &EnvConfig,
    cfg: &TrainConfig,
    alignment: &AlignmentParams,
    advisor: Option<&dyn Advisor>,
    log: &mut dyn FnMut(&EpisodeLog) -> std::io::Result<()>,
    trajectory: &mut dyn TrajectorySink,
) -> Result<Checkpoint, TrainError> {
    let mut trainer = Trainer::new(method, env_config.clone(), cfg.clone(), *alignment, advisor)?;
    trainer.run(log, trajectory)?;
    Ok(trainer.checkpoint())
}
