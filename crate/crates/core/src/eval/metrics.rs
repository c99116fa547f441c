use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{CoverageMap, GridDims};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid battery levels: initial {initial}, final {remaining} (need initial > 0 and 0 <= final <= initial)")]
pub struct InvalidBattery {
    pub initial: f64,
    pub remaining: f64,
}

/// Covered ground cells over all ground cells.
pub fn vcr(coverage: &CoverageMap) -> f64 {
    coverage.fraction()
}

/// Coverage per unit of battery consumed: `vcr / (2 − final/initial)`.
pub fn battery_efficiency(vcr: f64, initial: f64, remaining: f64) -> Result<f64, InvalidBattery> {
    if !(initial > 0.0 && remaining >= 0.0 && remaining <= initial) {
        return Err(InvalidBattery { initial, remaining });
    }
    Ok(vcr / (2.0 - remaining / initial))
}

/// Covered cells seen more than once, over covered cells.
pub fn rvc(coverage: &CoverageMap) -> f64 {
    match coverage.covered_count() {
        0 => 0.0,
        covered => coverage.multi_visit_count() as f64 / covered as f64,
    }
}

/// Ratio of test to train grid volume.
pub fn scale_factor(train: GridDims, test: GridDims) -> f64 {
    test.volume() as f64 / train.volume() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub episode: u32,
    pub seed: u64,
    pub vcr: f64,
    pub be: f64,
    pub rvc: f64,
    pub steps_used: u32,
    pub battery_initial: f64,
    pub battery_final: f64,
    pub collisions: u32,
}

impl EpisodeMetrics {
    pub fn from_coverage(
        episode: u32,
        seed: u64,
        coverage: &CoverageMap,
        steps_used: u32,
        battery_initial: f64,
        battery_final: f64,
        collisions: u32,
    ) -> Result<Self, InvalidBattery> {
        let v = vcr(coverage);
        Ok(EpisodeMetrics {
            episode,
            seed,
            vcr: v,
            be: battery_efficiency(v, battery_initial, battery_final)?,
            rvc: rvc(coverage),
            steps_used,
            battery_initial,
            battery_final,
            collisions,
        })
    }
}
