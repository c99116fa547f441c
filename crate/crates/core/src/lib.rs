//! Coverage planning for a pan-tilt-zoom UAV camera: grid environment,
//! reward shaping from an external advisor, PPO training and evaluation.

pub mod advisor;
pub mod env;
pub mod eval;
pub mod pare;
pub mod policy;
pub mod reward;
pub mod trajectory;
