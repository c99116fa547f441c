mod controller;
mod harness;
mod metrics;

pub use controller::*;
pub use harness::*;
pub use metrics::*;
