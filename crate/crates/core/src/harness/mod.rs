//! Experiment orchestration: configs, metrics, statistics, batch runner.

pub mod config;
pub mod metrics;
pub mod runner;
pub mod stats;
