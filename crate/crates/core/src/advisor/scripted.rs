//! Deterministic greedy stand-in for the language-model advisor.

use std::time::Duration;

use crate::env::{
    view_cone, CameraConfig, CoverageMap, GridDims, Obstacle, Position, UavState, STEEP_TILT,
    ZOOM_MAX_TENTHS, ZOOM_MIN_TENTHS,
};
use crate::pare::Advice;

use super::{reply_from_text, AdviceQuery, Advisor, AdvisorError, AdvisorReply};

/// Tilt recommended when the current tilt is too steep for the wide footprint.
const SHALLOW_TILT: i32 = STEEP_TILT - 5;

/// One-step lookahead over the 27 relative moves: pick the in-bounds,
/// collision-free move whose best wide-footprint camera sees the most
/// uncovered ground; ties go to the lexicographically smallest move.
pub fn scripted_oracle(
    state: &UavState,
    coverage: &CoverageMap,
    obstacles: &[Obstacle],
    dims: GridDims,
) -> Advice {
    let here = state.position;
    let current = state.camera;
    let mut best: Option<([i32; 3], Position, usize, i32)> = None;
    for dx in -1..=1 {
        for dy in -1..=1 {
            for dz in -1..=1 {
                let (x, y, z) = here.offset(dx, dy, dz);
                let target = Position::new(x, y, z);
                if !dims.contains(target) || obstacles.iter().any(|o| o.contains(target)) {
                    continue;
                }
                let (gain, zoom) = best_zoom(target, current.zoom_tenths(), coverage, dims);
                if best.map_or(true, |(_, _, g, _)| gain > g) {
                    best = Some(([dx, dy, dz], target, gain, zoom));
                }
            }
        }
    }
    // the current cell is always free, so a candidate exists
    let (delta, target, gain, zoom) = best.expect("current position is collision-free");
    if gain == 0 {
        return Advice::new(delta, current);
    }
    let tilt = if current.tilt() < STEEP_TILT { current.tilt() } else { SHALLOW_TILT };
    let pan = quadrant_pan(target, current.pan(), coverage, dims);
    Advice::new(delta, CameraConfig::from_parts(tilt, pan, zoom))
}

/// Most uncovered cells reachable with a shallow tilt at `target`, and the
/// zoom achieving it that is closest to the current zoom (larger on ties).
fn best_zoom(target: Position, current_tenths: i32, coverage: &CoverageMap, dims: GridDims) -> (usize, i32) {
    let mut by_radius = [None::<usize>; 5];
    let mut best = (0usize, current_tenths);
    let mut best_dist = i32::MAX;
    for tenths in ZOOM_MIN_TENTHS..=ZOOM_MAX_TENTHS {
        let probe = CameraConfig::from_parts(0, 0, tenths);
        let r = probe.footprint_radius() as usize;
        let gain = *by_radius[r]
            .get_or_insert_with(|| coverage.uncovered_count_in(&view_cone(target, probe, dims)));
        let dist = (tenths - current_tenths).abs();
        if gain > best.0 || (gain == best.0 && (dist < best_dist || (dist == best_dist && tenths > best.1))) {
            best = (gain, tenths);
            best_dist = dist;
        }
    }
    best
}

/// Pan toward the quadrant around `target` with the most uncovered ground.
/// Heading is +y: pan +45 looks at (+x,+y), +90 at (+x,−y), −45 at (−x,+y),
/// −90 at (−x,−y). A current pan already facing a tied-best quadrant is kept;
/// other ties go to the first quadrant in that order.
fn quadrant_pan(target: Position, current_pan: i32, coverage: &CoverageMap, dims: GridDims) -> i32 {
    let mut counts = [0usize; 4];
    for i in 0..dims.x_size as i32 {
        for j in 0..dims.y_size as i32 {
            let cell = crate::env::GroundCell { i, j };
            if coverage.is_covered(cell) {
                continue;
            }
            let east = i >= target.x;
            let north = j >= target.y;
            let q = match (east, north) {
                (true, true) => 0,
                (false, true) => 1,
                (true, false) => 2,
                (false, false) => 3,
            };
            counts[q] += 1;
        }
    }
    const PANS: [i32; 4] = [45, -45, 90, -90];
    let mut q = 0;
    for k in 1..4 {
        if counts[k] > counts[q] {
            q = k;
        }
    }
    match PANS.iter().position(|&p| p == current_pan) {
        Some(k) if counts[k] == counts[q] => current_pan,
        _ => PANS[q],
    }
}

/// [`scripted_oracle`] behind the [`Advisor`] interface. Replies carry the
/// canonical response text and zero latency.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScriptedOracle;

impl Advisor for ScriptedOracle {
    fn advise(&self, q: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        let advice = scripted_oracle(q.state, q.coverage, q.obstacles, q.dims);
        reply_from_text(advice.canonical(), Duration::ZERO)
    }

    fn needs_prompt(&self) -> bool {
        false
    }
}
