//! Advisor backends: something that turns the current situation into an
//! [`Advice`]. A remote chat-completion model, a deterministic scripted
//! oracle, and a caching/replay wrapper all sit behind [`Advisor`].

mod cache;
mod http;
mod scripted;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::env::{CoverageMap, GridDims, Obstacle, UavState};
use crate::pare::{Advice, AdviceUnparseable};

pub use cache::{load_replay, AdvisorRecord, CachedAdvisor, ReplayAdvisor};
pub use http::{HttpAdvisor, HttpAdvisorConfig, API_KEY_ENV};
pub use scripted::{scripted_oracle, ScriptedOracle};

#[derive(Debug, Error)]
pub enum AdvisorError {
    #[error("advisor timed out after {0:?}")]
    Timeout(Duration),
    #[error("advisor http error {status}: {body}")]
    Http { status: u16, body: String },
    #[error("advisor transport error: {0}")]
    Transport(String),
    #[error("{source} (raw response {raw:?})")]
    Unparseable { raw: String, source: AdviceUnparseable },
    #[error("no replay record for state {0}")]
    ReplayMiss(String),
    #[error("replay file: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything a backend may look at. Remote models only read the prompt;
/// the scripted oracle reads the structured state.
#[derive(Debug, Clone, Copy)]
pub struct AdviceQuery<'a> {
    pub prompt: &'a str,
    pub state: &'a UavState,
    pub coverage: &'a CoverageMap,
    pub obstacles: &'a [Obstacle],
    pub dims: GridDims,
}

impl AdviceQuery<'_> {
    pub fn state_key(&self) -> String {
        state_key(self.state, self.coverage.fraction())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvisorReply {
    pub advice: Advice,
    pub raw_response: String,
    pub latency: Duration,
}

pub trait Advisor: Send + Sync {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError>;

    /// Whether this backend reads [`AdviceQuery::prompt`]. Callers may pass an
    /// empty prompt otherwise.
    fn needs_prompt(&self) -> bool {
        true
    }
}

impl<A: Advisor + ?Sized> Advisor for Box<A> {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        (**self).advise(query)
    }

    fn needs_prompt(&self) -> bool {
        (**self).needs_prompt()
    }
}

impl<A: Advisor + ?Sized> Advisor for std::sync::Arc<A> {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        (**self).advise(query)
    }

    fn needs_prompt(&self) -> bool {
        (**self).needs_prompt()
    }
}

/// Stable key of a situation: position, camera, battery to 0.01 and coverage
/// to 0.0001 (the precision the prompt shows).
pub fn state_key(state: &UavState, coverage: f64) -> String {
    let p = state.position;
    let c = state.camera;
    let text = format!(
        "{},{},{}|{},{},{}|{}|{}",
        p.x,
        p.y,
        p.z,
        c.tilt(),
        c.pan(),
        c.zoom_tenths(),
        (state.battery * 100.0).round() as i64,
        (coverage * 10_000.0).round() as i64,
    );
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses a raw response into a reply, keeping the text on failure.
pub(crate) fn reply_from_text(raw: String, latency: Duration) -> Result<AdvisorReply, AdvisorError> {
    match crate::pare::parse_advice(&raw) {
        Ok(advice) => Ok(AdvisorReply { advice, raw_response: raw, latency }),
        Err(source) => Err(AdvisorError::Unparseable { raw, source }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CameraConfig, Position};

    #[test]
    fn state_key_is_pure_and_sensitive() {
        let s = UavState { position: Position::new(1, 2, 0), camera: CameraConfig::default(), battery: 0.5 };
        assert_eq!(state_key(&s, 0.25), state_key(&s, 0.25));
        assert_eq!(state_key(&s, 0.25).len(), 16);
        assert_ne!(state_key(&s, 0.25), state_key(&s, 0.26));
        let mut t = s;
        t.position.z = 1;
        assert_ne!(state_key(&s, 0.25), state_key(&t, 0.25));
        // battery within the same bucket
        t = s;
        t.battery = 0.501;
        assert_eq!(state_key(&s, 0.25), state_key(&t, 0.25));
    }
}
