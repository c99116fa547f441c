use std::path::Path;

use anyhow::{Context, Result};
use pirl_core::advisor::{Advisor, CachedAdvisor, HttpAdvisor, ReplayAdvisor, ScriptedOracle};

use crate::config::{AdvisorKind, AdvisorSpec};

/// File name for the recorded responses of an HTTP-backed run.
pub const REPLAY_RECORD: &str = "advisor_replay.jsonl";

/// Builds the configured backend behind a refresh-interval cache. HTTP
/// responses are recorded under `out_dir` so the run can be replayed offline.
pub fn build(spec: &AdvisorSpec, out_dir: &Path) -> Result<Box<dyn Advisor>> {
    Ok(match spec.kind {
        AdvisorKind::Scripted => Box::new(CachedAdvisor::new(ScriptedOracle, spec.interval)),
        AdvisorKind::Http => {
            let path = out_dir.join(REPLAY_RECORD);
            let cached = CachedAdvisor::new(HttpAdvisor::new(spec.http.clone()), spec.interval)
                .recording_to(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            Box::new(cached)
        }
        AdvisorKind::Replay => {
            let path = spec.replay_file.as_deref().context("replay advisor needs a replay file")?;
            let replay =
                ReplayAdvisor::from_file(path).with_context(|| format!("loading replay file {}", path.display()))?;
            Box::new(CachedAdvisor::new(replay, spec.interval))
        }
    })
}
