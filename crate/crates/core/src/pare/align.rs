//! Alignment between the agent's transition and the advisor's recommendation.
//!
//! Movement alignment is a soft constraint and can be rewarded; camera
//! alignment is a hard constraint and is only ever penalized.

use serde::{Deserialize, Serialize};

use crate::env::{
    CameraConfig, GridDims, Position, UavState, PAN_MAX, PAN_MIN, TILT_MAX, TILT_MIN, ZOOM_MAX_TENTHS,
    ZOOM_MIN_TENTHS,
};

use super::advice::Advice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentParams {
    /// Weight of direction vs. position inside the movement term, in `[0, 1]`.
    pub alpha: f64,
    pub w_move_align: f64,
    pub w_cam_align: f64,
    /// Divide each camera difference by its range width before summing.
    pub normalize_camera: bool,
}

impl Default for AlignmentParams {
    fn default() -> Self {
        AlignmentParams { alpha: 0.5, w_move_align: 0.5, w_cam_align: 0.5, normalize_camera: false }
    }
}

impl AlignmentParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha {} not in [0,1]", self.alpha));
        }
        if !(self.w_move_align >= 0.0 && self.w_cam_align >= 0.0) {
            return Err("alignment weights must be >= 0".into());
        }
        Ok(())
    }
}

/// Cosine similarity; 0 when either vector has zero length.
pub fn dir_align(agent: [f64; 3], advised: [f64; 3]) -> f64 {
    let dot: f64 = agent.iter().zip(&advised).map(|(a, b)| a * b).sum();
    let na = agent.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb = advised.iter().map(|b| b * b).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// `1 − ‖p − q‖₂ / d_max`.
pub fn pos_align(p: Position, q: Position, d_max: f64) -> f64 {
    let d = (p.distance_sq(&q) as f64).sqrt();
    1.0 - d / d_max
}

pub fn move_reward(alpha: f64, dir: f64, pos: f64) -> f64 {
    alpha * dir + (1.0 - alpha) * pos
}

/// Negative L1 distance over (tilt, pan, zoom) in native units, or with each
/// term divided by its range width when `normalize` is set.
pub fn cam_align_penalty(camera: CameraConfig, target: CameraConfig, normalize: bool) -> f64 {
    let dt = f64::from((camera.tilt() - target.tilt()).abs());
    let dp = f64::from((camera.pan() - target.pan()).abs());
    let dz = f64::from((camera.zoom_tenths() - target.zoom_tenths()).abs()) / 10.0;
    if normalize {
        let wt = f64::from(TILT_MAX - TILT_MIN);
        let wp = f64::from(PAN_MAX - PAN_MIN);
        let wz = f64::from(ZOOM_MAX_TENTHS - ZOOM_MIN_TENTHS) / 10.0;
        -(dt / wt + dp / wp + dz / wz)
    } else {
        -(dt + dp + dz)
    }
}

/// Components of the advisor-alignment reward for one transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shaping {
    pub dir_align: f64,
    pub pos_align: f64,
    pub move_reward: f64,
    pub cam_penalty: f64,
    pub total: f64,
}

/// `w_cam · cam_penalty + w_move · move_reward` for the transition
/// `prev → next` against `advice` issued at `prev`.
pub fn llm_shaping(
    params: &AlignmentParams,
    dims: GridDims,
    prev: &UavState,
    next: &UavState,
    advice: &Advice,
) -> Shaping {
    let target = advice.target_position(prev.position, dims);
    let delta = |to: Position| -> [f64; 3] {
        [
            f64::from(to.x - prev.position.x),
            f64::from(to.y - prev.position.y),
            f64::from(to.z - prev.position.z),
        ]
    };
    let dir = dir_align(delta(next.position), delta(target));
    let pos = pos_align(next.position, target, dims.max_distance().max(f64::MIN_POSITIVE));
    let mv = move_reward(params.alpha, dir, pos);
    let cam = cam_align_penalty(next.camera, advice.camera_target, params.normalize_camera);
    Shaping {
        dir_align: dir,
        pos_align: pos,
        move_reward: mv,
        cam_penalty: cam,
        total: params.w_cam_align * cam + params.w_move_align * mv,
    }
}
