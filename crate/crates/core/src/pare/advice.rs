//! Advisor recommendations and the tolerant `key: value` response parser.

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{CameraConfig, GridDims, Position};

use super::prompt::format_zoom;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("advice unparseable: {reason}")]
pub struct AdviceUnparseable {
    pub reason: String,
}

/// A relative move in `[-1, 1]³` plus an absolute camera target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Advice {
    pub delta_position: [i32; 3],
    pub camera_target: CameraConfig,
}

impl Advice {
    pub fn new(delta: [i32; 3], camera_target: CameraConfig) -> Self {
        Advice { delta_position: delta.map(|d| d.clamp(-1, 1)), camera_target }
    }

    /// The advised absolute position, clamped to the grid.
    pub fn target_position(&self, current: Position, dims: GridDims) -> Position {
        let [dx, dy, dz] = self.delta_position;
        let (x, y, z) = current.offset(dx, dy, dz);
        dims.clamp(x, y, z)
    }

    /// Canonical response text; parses back to the same advice.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Advice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.camera_target;
        let [x, y, z] = self.delta_position;
        write!(
            f,
            "pan: {}, tilt: {}, zoom: {}, X: {x}, Y: {y}, Z: {z}",
            c.pan(),
            c.tilt(),
            format_zoom(c.zoom_tenths())
        )
    }
}

const KEYS: [&str; 6] = ["pan", "tilt", "zoom", "x", "y", "z"];

fn pair_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)\b(pan|tilt|zoom|x|y|z)\b\s*[:=]\s*([-+]?(?:\d+(?:\.\d*)?|\.\d+))")
            .expect("static pattern")
    })
}

/// Extracts the six recommendation values from free text. Keys are matched
/// case-insensitively in any order; the first occurrence of a key wins.
/// Values are clamped and snapped onto the camera lattice and `[-1, 1]`.
pub fn parse_advice(response: &str) -> Result<Advice, AdviceUnparseable> {
    let mut values: [Option<f64>; 6] = [None; 6];
    for caps in pair_pattern().captures_iter(response) {
        let key = caps[1].to_ascii_lowercase();
        let slot = KEYS.iter().position(|k| *k == key).expect("pattern only admits known keys");
        if values[slot].is_some() {
            continue;
        }
        let v: f64 = caps[2].parse().map_err(|_| AdviceUnparseable {
            reason: format!("{key} has non-numeric value {:?}", &caps[2]),
        })?;
        if !v.is_finite() {
            return Err(AdviceUnparseable { reason: format!("{key} is not finite") });
        }
        values[slot] = Some(v);
    }
    let missing: Vec<&str> =
        KEYS.iter().zip(values.iter()).filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
    if !missing.is_empty() {
        return Err(AdviceUnparseable { reason: format!("missing {}", missing.join(", ")) });
    }
    let v = values.map(|v| v.unwrap_or_default());
    let [pan, tilt, zoom, x, y, z] = v;
    let step = |d: f64| d.clamp(-1.0, 1.0).round() as i32;
    Ok(Advice {
        delta_position: [step(x), step(y), step(z)],
        camera_target: CameraConfig::snapped(tilt, pan, zoom),
    })
}
