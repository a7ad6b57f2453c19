//! Dual-encoding genetic algorithms.
//!
//! A GA library built around switching a population's genotype encoding
//! (standard binary or reflected Gray) during the run. It provides:
//!
//! - [`encoding`]: bitstring genotypes, decode/encode under both codings,
//!   phenotype-preserving conversion;
//! - [`objectives`]: five classic real-valued benchmark functions
//!   (Rosenbrock, Schaffer, Rastrigin, Griewangk, Schwefel);
//! - [`engine`]: a simple generational GA with tournament selection,
//!   one-point crossover, bit-flip mutation and elitism;
//! - [`strategies`]: six dynamic encoding-change strategies, from periodic
//!   alternation to the parallel Split-and-Merge GA;
//! - [`landscape`]: exhaustive census of Hamming-1 local optima per coding;
//! - [`harness`]: multi-run experiment batches, GNTO/SR/SR2/MBF metrics,
//!   Student's t-test and CSV emission.
//!
//! Everything is deterministic given a root seed.

pub mod encoding;
pub mod engine;
pub mod error;
pub mod harness;
pub mod landscape;
pub mod objectives;
pub mod seeds;
pub mod strategies;

pub use error::{Error, Result};
