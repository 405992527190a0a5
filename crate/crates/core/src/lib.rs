//! Deterministic discrete-event simulation of routing in opportunistic
//! networks: contact sources, social analytics, protocols and metrics.

pub mod config;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod routing;
pub mod social;
pub mod sources;
pub mod types;

pub use error::{Error, Result};
