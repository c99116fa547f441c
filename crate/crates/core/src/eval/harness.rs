use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisor::Advisor;
use crate::env::{episode_seed, Env, EnvConfig, EnvError, GridDims};
use crate::pare::AlignmentParams;
use crate::policy::{query_advisor, shaping_term};
use crate::reward::{compute_reward, RewardInputs, RewardWeights};
use crate::trajectory::{TrajectoryRecord, TrajectorySink};

use super::controller::{ControlInput, Controller};
use super::metrics::{EpisodeMetrics, InvalidBattery};

/// Seed stream for evaluation episode layouts.
pub const EVAL_STREAM: u64 = 2;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("n_episodes must be at least 1")]
    NoEpisodes,
    #[error("controller needs advice but no advisor was given")]
    AdvisorRequired,
    #[error("episode {episode}: {source}")]
    Env { episode: u32, source: EnvError },
    #[error("episode {episode}: {source}")]
    Metrics { episode: u32, source: InvalidBattery },
    #[error("trajectory log: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub dims: GridDims,
    pub max_steps: u32,
    pub base_seed: u64,
    pub episodes: Vec<EpisodeMetrics>,
    pub mean_vcr: f64,
    pub mean_be: f64,
    pub mean_rvc: f64,
}

impl EvalReport {
    pub fn new(method: &str, config: &EnvConfig, base_seed: u64, episodes: Vec<EpisodeMetrics>) -> Self {
        let mean = |f: fn(&EpisodeMetrics) -> f64| {
            if episodes.is_empty() {
                0.0
            } else {
                episodes.iter().map(f).sum::<f64>() / episodes.len() as f64
            }
        };
        EvalReport {
            method: method.to_string(),
            dims: config.dims,
            max_steps: config.max_steps,
            base_seed,
            mean_vcr: mean(|m| m.vcr),
            mean_be: mean(|m| m.be),
            mean_rvc: mean(|m| m.rvc),
            episodes,
        }
    }

    pub const CSV_HEADER: &'static str = "method,grid,episodes,mean_vcr,mean_be,mean_rvc";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.method,
            self.dims,
            self.episodes.len(),
            self.mean_vcr,
            self.mean_be,
            self.mean_rvc
        )
    }

    /// Header plus one summary row per report.
    pub fn write_csv<W: Write>(reports: &[EvalReport], mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in reports {
            writeln!(out, "{}", r.csv_row())?;
        }
        Ok(())
    }

    /// One JSON line per episode.
    pub fn write_episodes_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for ep in &self.episodes {
            let line = serde_json::json!({ "method": self.method, "grid": self.dims.to_string(), "metrics": ep });
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub n_episodes: u32,
    pub base_seed: u64,
    /// Weights for the logged reward breakdown; they do not affect control.
    pub weights: RewardWeights,
    pub alignment: AlignmentParams,
}

impl EvalOptions {
    pub fn new(n_episodes: u32, base_seed: u64) -> Self {
        EvalOptions { n_episodes, base_seed, weights: RewardWeights::midpoint(), alignment: AlignmentParams::default() }
    }
}

/// Runs `opts.n_episodes` episodes with layouts drawn from `opts.base_seed`,
/// so every controller evaluated with the same options faces the same
/// obstacles and start positions.
pub fn evaluate(
    method: &str,
    controller: &mut dyn Controller,
    advisor: Option<&dyn Advisor>,
    config: &EnvConfig,
    opts: &EvalOptions,
    trajectory: &mut dyn TrajectorySink,
) -> Result<EvalReport, EvalError> {
    if opts.n_episodes == 0 {
        return Err(EvalError::NoEpisodes);
    }
    let advisor = if controller.wants_advice() { Some(advisor.ok_or(EvalError::AdvisorRequired)?) } else { None };
    let mut episodes = Vec::with_capacity(opts.n_episodes as usize);
    for episode in 0..opts.n_episodes {
        let seed = episode_seed(opts.base_seed, EVAL_STREAM, u64::from(episode));
        let env_err = |source| EvalError::Env { episode, source };
        let mut env = Env::reset(config, seed).map_err(env_err)?;
        let dims = env.dims();
        let start = *env.state();
        trajectory.record(&TrajectoryRecord::EpisodeStart {
            method: method.to_string(),
            episode,
            seed,
            dims,
            max_steps: config.max_steps,
            obstacles: env.obstacles().to_vec(),
            start,
            weights: opts.weights,
        })?;
        let mut collisions = 0;
        while !env.is_done() {
            let state = *env.state();
            let advice = advisor.and_then(|a| query_advisor(a, &env));
            let action = controller.act(&ControlInput {
                state: &state,
                coverage: env.coverage(),
                obstacles: env.obstacles(),
                dims,
                advice: advice.as_ref(),
            });
            let covered_before = env.coverage().covered_count();
            let events = match action {
                Some(a) => env.step(a),
                None => env.hold(),
            }
            .map_err(env_err)?;
            let next = *env.state();
            let shaping = advice.map_or(0.0, |adv| shaping_term(&opts.alignment, dims, &state, &next, &adv));
            let reward = compute_reward(
                &opts.weights,
                &RewardInputs {
                    events: &events,
                    covered_before,
                    covered_after: env.coverage().covered_count(),
                    total_cells: env.coverage().total_cells(),
                    camera_action: action.is_some_and(|a| a.is_camera()),
                    llm_shaping: shaping,
                },
            );
            collisions += u32::from(events.collision);
            trajectory.record(&TrajectoryRecord::Step {
                episode,
                step: env.steps_taken() - 1,
                state,
                action,
                next_state: next,
                events,
                reward,
                advice,
            })?;
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
        .map_err(|source| EvalError::Metrics { episode, source })?;
        trajectory.record(&TrajectoryRecord::EpisodeEnd { episode, metrics: metrics.clone() })?;
        episodes.push(metrics);
    }
    Ok(EvalReport::new(method, config, opts.base_seed, episodes))
}
