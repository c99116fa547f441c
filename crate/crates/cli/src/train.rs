use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::{bail, Context, Result};
use pirl_core::advisor::Advisor;
use pirl_core::policy::{Checkpoint, Trainer};
use pirl_core::trajectory::{JsonlSink, NullSink, TrajectorySink};

use crate::config::{write_json, RunConfig};

pub const CHECKPOINT: &str = "checkpoint.json";
pub const TRAIN_LOG: &str = "train_log.jsonl";
pub const TRAJECTORY: &str = "trajectory.jsonl";
pub const EFFECTIVE_CONFIG: &str = "config.json";

pub struct TrainOutcome {
    pub checkpoint: PathBuf,
    pub episodes: u32,
    pub interrupted: bool,
}

/// Trains per `cfg` and writes the effective config, the per-episode log,
/// optional trajectories and the final checkpoint into `cfg.out_dir`.
/// When `stop` is raised the current episode finishes, then the partial
/// rollout is applied and a checkpoint is written as usual.
pub fn run(cfg: &RunConfig, stop: &AtomicBool) -> Result<TrainOutcome> {
    cfg.validate()?;
    if !cfg.method.is_trainable() {
        bail!("method {} has no policy to train; evaluate it directly", cfg.method);
    }
    let out = cfg.out_dir.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))?;
    write_json(&out.join(EFFECTIVE_CONFIG), cfg)?;

    let advisor: Option<Box<dyn Advisor>> =
        if cfg.method.queries_advisor() { Some(crate::advisor::build(&cfg.advisor, out)?) } else { None };
    let mut trainer =
        Trainer::new(cfg.method, cfg.env.clone(), cfg.train.clone(), cfg.alignment, advisor.as_deref())?;

    let mut log = BufWriter::new(create(&out.join(TRAIN_LOG))?);
    let mut trajectory: Box<dyn TrajectorySink> = if cfg.log_trajectories {
        Box::new(JsonlSink(BufWriter::new(create(&out.join(TRAJECTORY))?)))
    } else {
        Box::new(NullSink)
    };

    let mut interrupted = false;
    while !trainer.is_finished() {
        if stop.load(Ordering::SeqCst) {
            interrupted = true;
            break;
        }
        let entry = trainer.run_episode(trajectory.as_mut())?;
        serde_json::to_writer(&mut log, &entry)?;
        log.write_all(b"\n")?;
    }
    trainer.finish()?;
    log.flush()?;
    trajectory.flush()?;

    let path = out.join(CHECKPOINT);
    save_checkpoint(&path, &trainer.checkpoint())?;
    Ok(TrainOutcome { checkpoint: path, episodes: trainer.episodes_done(), interrupted })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer(&mut w, ckpt)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    let ckpt: Checkpoint =
        serde_json::from_str(&text).with_context(|| format!("parsing checkpoint {}", path.display()))?;
    ckpt.check_compatible().map_err(anyhow::Error::msg).with_context(|| format!("checkpoint {}", path.display()))?;
    Ok(ckpt)
}
