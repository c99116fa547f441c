use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use pirl_core::env::GridDims;
use pirl_core::eval::{evaluate, AdviceFollower, Controller, EvalOptions, EvalReport, GreedyPolicy};
use pirl_core::policy::Method;
use pirl_core::trajectory::{JsonlSink, TrajectorySink};
use serde::Serialize;

use crate::config::{write_json, RunConfig};
use crate::train::load_checkpoint;

/// Effective settings of an evaluation, persisted next to its outputs.
#[derive(Debug, Serialize)]
struct EvalSnapshot<'a> {
    method: Method,
    checkpoint: Option<&'a PathBuf>,
    train_grid: GridDims,
    config: &'a RunConfig,
}

pub struct EvalOutcome {
    pub report: EvalReport,
    pub csv: PathBuf,
}

/// Evaluates `cfg.method` on `grid` (default: the training grid), scaling
/// the step budget and battery drain from the training grid. Trained
/// methods read their policy, environment and alignment settings from the
/// checkpoint; `llm-only` runs on `cfg` alone.
pub fn run(mut cfg: RunConfig, checkpoint: Option<&PathBuf>, grid: Option<GridDims>) -> Result<EvalOutcome> {
    let ckpt = match (cfg.method, checkpoint) {
        (Method::LlmOnly, _) => None,
        (m, None) => bail!("method {m} needs --checkpoint"),
        (m, Some(path)) => {
            let ckpt = load_checkpoint(path)?;
            if ckpt.method != m {
                bail!("checkpoint {} was trained with {}, not {m}", path.display(), ckpt.method);
            }
            cfg.env = ckpt.env_config.clone();
            cfg.alignment = ckpt.alignment;
            Some(ckpt)
        }
    };
    let train_grid = cfg.env.dims;
    let env = cfg.env.scaled(train_grid, grid.unwrap_or(train_grid));
    cfg.env = env.clone();
    cfg.validate()?;
    if cfg.eval.episodes == 0 {
        bail!("--episodes must be at least 1");
    }

    let out = cfg.out_dir.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))?;
    let id = cfg.method.id();
    write_json(
        &out.join(format!("eval_{id}_config.json")),
        &EvalSnapshot { method: cfg.method, checkpoint, train_grid, config: &cfg },
    )?;

    let advisor = if cfg.method.queries_advisor() { Some(crate::advisor::build(&cfg.advisor, out)?) } else { None };
    let mut greedy;
    let mut follower = AdviceFollower;
    let controller: &mut dyn Controller = match &ckpt {
        Some(c) => {
            greedy = GreedyPolicy(&c.params);
            &mut greedy
        }
        None => &mut follower,
    };
    let opts = EvalOptions { alignment: cfg.alignment, ..EvalOptions::new(cfg.eval.episodes, cfg.eval.seed) };
    let traj_path = out.join(format!("eval_{id}_trajectory.jsonl"));
    let mut sink = JsonlSink(BufWriter::new(
        File::create(&traj_path).with_context(|| format!("creating {}", traj_path.display()))?,
    ));
    let report = evaluate(cfg.method.label(), controller, advisor.as_deref(), &env, &opts, &mut sink)?;
    sink.flush()?;

    let csv = out.join(format!("eval_{id}.csv"));
    EvalReport::write_csv(std::slice::from_ref(&report), BufWriter::new(File::create(&csv)?))?;
    let episodes = out.join(format!("eval_{id}_episodes.jsonl"));
    report.write_episodes_jsonl(BufWriter::new(File::create(&episodes)?))?;
    Ok(EvalOutcome { report, csv })
}
