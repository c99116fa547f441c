//! Structured zero-shot prompt: task description, environment summary and
//! request template, concatenated in that order.

use std::fmt::Write;

use crate::env::{GridDims, Obstacle, UavState};

pub const TASK_HEADER: &str = "[Task Description]";
pub const ENV_HEADER: &str = "[Environment Summary]";
pub const QUERY_HEADER: &str = "[Request Template]";

/// Field of view and resolution have no counterpart in the state; they are
/// fixed values of the prompt.
pub const FIELD_OF_VIEW: f64 = 90.0;
pub const RESOLUTION: f64 = 1.0;

const TASK_BODY: &str = "You are a drone controller fitted with a gimbal-mounted camera tasked with maximizing visual ground coverage within a 3D environment. Suggest movements in the 3D space (X, Y, Z) and camera adjustments (pan, tilt, zoom) that enhance visual ground coverage while minimizing battery consumption, avoiding obstacles, and reducing redundant observations.";

const VIEW_CONE_TEXT: &str = "The camera params in the drone state are listed in order as: field of view (degrees), resolution, tilt (degrees), pan (degrees), and zoom. The camera emits a downward-facing square view cone projected onto the ground level (z=0), centered on the drone\u{2019}s current (x, y) location. The size of the view cone is determined by the zoom level and tilt angle. If tilt < 80, the cone has a half-width of approximately 2\u{d7}zoom units in both x and y directions; otherwise, it is 1\u{d7}zoom.";

const QUERY_BODY: &str = "1. You can adjust tilt, pan, zoom, and movement along the X, Y, and Z axes.
2. The battery ranges from 0 to 1 where 1 and 0 are the maximum and minimum battery levels respectively. The drone will be unable to move once battery level reaches 0.
3. The values should be in the range: pan: [-90, 90] degrees, tilt: [0, 90] degrees, zoom: [0.5, 2.0], X:[-1, 1], Y:[-1, 1], Z:[-1, 1].";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptParts {
    pub task: String,
    pub env_summary: String,
    pub query: String,
}

impl PromptParts {
    pub fn build(state: &UavState, coverage: f64, dims: GridDims, obstacles: &[Obstacle]) -> Self {
        PromptParts {
            task: format!("{TASK_HEADER}\n{TASK_BODY}\n\n"),
            env_summary: env_summary(state, coverage, dims, obstacles),
            query: format!("{QUERY_HEADER}\n{QUERY_BODY}"),
        }
    }

    pub fn full(&self) -> String {
        let mut s = String::with_capacity(self.task.len() + self.env_summary.len() + self.query.len());
        s.push_str(&self.task);
        s.push_str(&self.env_summary);
        s.push_str(&self.query);
        s
    }
}

pub fn build_prompt(state: &UavState, coverage: f64, dims: GridDims, obstacles: &[Obstacle]) -> String {
    PromptParts::build(state, coverage, dims, obstacles).full()
}

/// Zoom prints without a fractional part when it is whole (`1`, `2`),
/// otherwise with one decimal (`1.5`).
pub fn format_zoom(zoom_tenths: i32) -> String {
    if zoom_tenths % 10 == 0 {
        format!("{}", zoom_tenths / 10)
    } else {
        format!("{}.{}", zoom_tenths / 10, zoom_tenths % 10)
    }
}

fn count_word(n: usize) -> String {
    const WORDS: [&str; 13] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
        "twelve",
    ];
    WORDS.get(n).map_or_else(|| n.to_string(), |w| (*w).to_string())
}

fn env_summary(state: &UavState, coverage: f64, dims: GridDims, obstacles: &[Obstacle]) -> String {
    let cam = state.camera;
    let mut s = String::new();
    s.push_str(ENV_HEADER);
    s.push('\n');
    let _ = write!(
        s,
        "Drone state: {{'drone_position': {}, 'camera_params': [{:.1}, {:.1}, {:.1}, {:.1}, {}], 'battery': {:.2}, 'coverage': {:.4}}}. ",
        state.position,
        FIELD_OF_VIEW,
        RESOLUTION,
        f64::from(cam.tilt()),
        f64::from(cam.pan()),
        format_zoom(cam.zoom_tenths()),
        state.battery,
        coverage,
    );
    let _ = write!(
        s,
        "The drone is currently operating in a {}\u{d7}{}\u{d7}{} grid environment and has visually covered a portion of the ground-level cells using its camera. ",
        dims.x_size, dims.y_size, dims.z_size
    );
    s.push_str(VIEW_CONE_TEXT);
    match obstacles.len() {
        0 => s.push_str(" There are no obstacles in the environment."),
        1 => s.push_str(" There is one spherical obstacle in the environment:"),
        n => {
            let _ = write!(s, " There are {} spherical obstacles in the environment:", count_word(n));
        }
    }
    for (k, o) in obstacles.iter().enumerate() {
        let _ = write!(s, "\n{}. Location: {} with radius: {} units", k + 1, o.center, o.radius);
    }
    s.push_str("\n\n");
    s
}
