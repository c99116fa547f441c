use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pirl_core::env::{CameraConfig, GridDims, Obstacle, Position, UavState};
use pirl_core::pare::build_prompt;
use serde::Deserialize;

/// Input of `pirl prompt`: the situation the advisor would be asked about.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptState {
    pub position: Position,
    pub camera: CameraConfig,
    pub battery: f64,
    pub coverage: f64,
    /// Grid size as `XxYxZ`.
    pub grid: String,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl PromptState {
    pub fn render(&self) -> Result<String> {
        let dims: GridDims = self.grid.parse().context("field grid")?;
        if !dims.contains(self.position) {
            bail!("field position: {} lies outside {dims}", self.position);
        }
        if !(0.0..=1.0).contains(&self.battery) {
            bail!("field battery: {} not in [0, 1]", self.battery);
        }
        if !(0.0..=1.0).contains(&self.coverage) {
            bail!("field coverage: {} not in [0, 1]", self.coverage);
        }
        let state = UavState { position: self.position, camera: self.camera, battery: self.battery };
        Ok(build_prompt(&state, self.coverage, dims, &self.obstacles))
    }
}

/// Reads a state from `path` (`-` for stdin) and returns the prompt text.
pub fn run(path: &Path) -> Result<String> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading state {}", path.display()))?
    };
    let state: PromptState = serde_json::from_str(&text).context("parsing state")?;
    state.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"position":[1,1,0],"camera":{"tilt":45,"pan":0,"zoom":1.0},"battery":1.0,"coverage":0.0,"grid":"4x4x1"}"#;

    #[test]
    fn minimal_state_has_three_sections() {
        let state: PromptState = serde_json::from_str(MINIMAL).unwrap();
        let p = state.render().unwrap();
        for h in ["[Task Description]", "[Environment Summary]", "[Request Template]"] {
            assert!(p.contains(h), "{h}");
        }
    }

    #[test]
    fn off_lattice_tilt_names_field() {
        let bad = MINIMAL.replace("\"tilt\":45", "\"tilt\":47");
        let err = serde_json::from_str::<PromptState>(&bad).unwrap_err();
        assert!(err.to_string().contains("tilt"), "{err}");
    }

    #[test]
    fn position_outside_grid_rejected() {
        let bad = MINIMAL.replace("[1,1,0]", "[9,1,0]");
        let state: PromptState = serde_json::from_str(&bad).unwrap();
        assert!(state.render().unwrap_err().to_string().contains("position"));
    }
}
