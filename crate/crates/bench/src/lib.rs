//! Experiment harness for the fast DCT+ transforms.

pub mod config;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod report;
pub mod signal;

pub use config::{BenchConfig, Mode};
pub use error::{BenchError, Result};
