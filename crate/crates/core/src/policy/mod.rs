mod gae;
pub mod net;
pub mod obs;
pub mod ppo;
pub mod train;

use thiserror::Error;

pub use gae::compute_gae;
pub use net::*;
pub use obs::*;
pub use ppo::*;
pub use train::*;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("rollout arrays differ in length: rewards {rewards}, values {values}, dones {dones}")]
    LengthMismatch { rewards: usize, values: usize, dones: usize },
    #[error("advantages have not been computed for this rollout")]
    AdvantagesMissing,
    #[error("non-finite gradient in epoch {epoch}, minibatch {minibatch}; update discarded")]
    NonFiniteGradient { epoch: u32, minibatch: u32 },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
}
