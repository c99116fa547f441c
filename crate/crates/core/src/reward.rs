//! Eight-component shaped reward and per-episode weight randomization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::StepEvents;

/// Signed coefficients of the reward terms. Penalty weights are negative,
/// incentive weights positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub lambda_c: f64,
    pub lambda_r: f64,
    pub lambda_b: f64,
    pub lambda_cam_usage: f64,
    pub lambda_cur: f64,
    pub lambda_collision: f64,
    pub lambda_idle: f64,
    pub lambda_llm: f64,
}

/// Uniform sampling interval of each weight, in field order.
pub const EWRI_RANGES: [(f64, f64); 8] = [
    (0.5, 1.5),   // coverage gain
    (-1.0, -0.2), // redundancy
    (-0.5, -0.1), // battery
    (0.2, 0.6),   // camera usage
    (0.2, 0.5),   // curiosity
    (-1.5, -0.8), // collision
    (-0.8, -0.3), // idle
    (0.2, 0.6),   // advisor alignment
];

impl RewardWeights {
    pub fn from_array(w: [f64; 8]) -> Self {
        RewardWeights {
            lambda_c: w[0],
            lambda_r: w[1],
            lambda_b: w[2],
            lambda_cam_usage: w[3],
            lambda_cur: w[4],
            lambda_collision: w[5],
            lambda_idle: w[6],
            lambda_llm: w[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.lambda_c,
            self.lambda_r,
            self.lambda_b,
            self.lambda_cam_usage,
            self.lambda_cur,
            self.lambda_collision,
            self.lambda_idle,
            self.lambda_llm,
        ]
    }

    /// One independent uniform draw per weight.
    pub fn sample_ewri<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut w = [0.0; 8];
        for (slot, &(lo, hi)) in w.iter_mut().zip(EWRI_RANGES.iter()) {
            *slot = rng.gen_range(lo..=hi);
        }
        Self::from_array(w)
    }

    /// Center of every interval; used for static-reward training and inference.
    pub fn midpoint() -> Self {
        let mut w = [0.0; 8];
        for (slot, &(lo, hi)) in w.iter_mut().zip(EWRI_RANGES.iter()) {
            *slot = 0.5 * (lo + hi);
        }
        Self::from_array(w)
    }

    pub fn without_llm(self) -> Self {
        RewardWeights { lambda_llm: 0.0, ..self }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|w| w * k))
    }

    pub fn within_ewri_ranges(&self) -> bool {
        self.to_array().iter().zip(EWRI_RANGES.iter()).all(|(w, &(lo, hi))| (lo..=hi).contains(w))
    }
}

/// Unweighted component values of one step plus their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub delta_coverage: f64,
    pub redundant: f64,
    pub battery_pen: f64,
    pub cam_usage: f64,
    pub curiosity: f64,
    pub collision: f64,
    pub idle: f64,
    pub llm_shaping: f64,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn components(&self) -> [f64; 8] {
        [
            self.delta_coverage,
            self.redundant,
            self.battery_pen,
            self.cam_usage,
            self.curiosity,
            self.collision,
            self.idle,
            self.llm_shaping,
        ]
    }
}

/// Everything the reward needs from one executed step.
#[derive(Debug, Clone, Copy)]
pub struct RewardInputs<'a> {
    pub events: &'a StepEvents,
    pub covered_before: usize,
    pub covered_after: usize,
    pub total_cells: usize,
    pub camera_action: bool,
    pub llm_shaping: f64,
}

/// Mean of `1/√(1+n)` over the observed cells' prior visit counts; 0 when
/// nothing was observed.
pub fn curiosity(prior_visits: &[u32]) -> f64 {
    if prior_visits.is_empty() {
        return 0.0;
    }
    let sum: f64 = prior_visits.iter().map(|&n| 1.0 / (1.0 + f64::from(n)).sqrt()).sum();
    sum / prior_visits.len() as f64
}

pub fn compute_reward(weights: &RewardWeights, inputs: &RewardInputs<'_>) -> RewardBreakdown {
    let ev = inputs.events;
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let mut out = RewardBreakdown {
        delta_coverage: (inputs.covered_after as f64 - inputs.covered_before as f64)
            / inputs.total_cells.max(1) as f64,
        redundant: indicator(ev.redundant),
        battery_pen: ev.battery_drain.max(0.0),
        cam_usage: indicator(inputs.camera_action && ev.newly_covered > 0),
        curiosity: curiosity(&ev.prior_visits),
        collision: indicator(ev.collision),
        idle: indicator(ev.idle),
        llm_shaping: inputs.llm_shaping,
        total: 0.0,
    };
    out.total = weights
        .to_array()
        .iter()
        .zip(out.components().iter())
        .map(|(w, c)| w * c)
        .sum();
    out
}
