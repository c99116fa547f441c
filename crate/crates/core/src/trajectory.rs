//! Per-step JSONL trajectory records, detailed enough to recount every
//! metric and to build state-action datasets for imitation learning.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::env::{Action, GridDims, Obstacle, StepEvents, UavState};
use crate::eval::EpisodeMetrics;
use crate::pare::Advice;
use crate::reward::{RewardBreakdown, RewardWeights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrajectoryRecord {
    EpisodeStart {
        method: String,
        episode: u32,
        seed: u64,
        dims: GridDims,
        max_steps: u32,
        obstacles: Vec<Obstacle>,
        start: UavState,
        weights: RewardWeights,
    },
    Step {
        episode: u32,
        step: u32,
        state: UavState,
        /// `None` for a hold step.
        action: Option<Action>,
        next_state: UavState,
        events: StepEvents,
        reward: RewardBreakdown,
        advice: Option<Advice>,
    },
    EpisodeEnd {
        episode: u32,
        metrics: EpisodeMetrics,
    },
}

pub trait TrajectorySink {
    fn record(&mut self, record: &TrajectoryRecord) -> io::Result<()>;

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Discards everything.
pub struct NullSink;

impl TrajectorySink for NullSink {
    fn record(&mut self, _: &TrajectoryRecord) -> io::Result<()> {
        Ok(())
    }
}

impl TrajectorySink for Vec<TrajectoryRecord> {
    fn record(&mut self, record: &TrajectoryRecord) -> io::Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

/// One JSON object per line.
pub struct JsonlSink<W: Write>(pub W);

impl<W: Write> TrajectorySink for JsonlSink<W> {
    fn record(&mut self, record: &TrajectoryRecord) -> io::Result<()> {
        serde_json::to_writer(&mut self.0, record)?;
        self.0.write_all(b"\n")
    }

    fn flush(&mut self) -> io::Result<()> {
        self.0.flush()
    }
}

impl<W: Write> JsonlSink<W> {
    pub fn into_inner(self) -> W {
        self.0
    }
}

/// Parses a JSONL trajectory, skipping blank lines.
pub fn read_trajectory(text: &str) -> Result<Vec<TrajectoryRecord>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
