//! Aggregate run metrics: GNTO, SR, SR2, MBF and the success-rate curve.

use std::fmt;

use crate::error::{Error, Result};
use crate::strategies::RunRecord;

/// Maximum generation needed to reach the optimum across all runs, or a
/// `<maxGen>+` sentinel when not every run succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gnto {
    Reached(u32),
    Exceeded(u32),
}

impl fmt::Display for Gnto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gnto::Reached(g) => write!(f, "{g}"),
            Gnto::Exceeded(max_gen) => write!(f, "{max_gen}+"),
        }
    }
}

/// Batch-level metrics over R runs of one (problem, strategy) cell.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub runs: usize,
    pub gnto: Gnto,
    /// Percentage of runs that reached the success threshold by maxGen.
    pub sr: f64,
    /// Percentage counting only successes at or before `reference_gen`.
    pub sr2: f64,
    pub reference_gen: u32,
    /// Mean final best fitness.
    pub mbf: f64,
}

fn check_same_shape(runs: &[RunRecord]) -> Result<u32> {
    let first = runs
        .first()
        .ok_or_else(|| Error::contract("compute_metrics on empty run set"))?;
    let max_gen = (first.best_per_gen.len() - 1) as u32;
    for r in runs {
        if r.problem != first.problem
            || r.strategy != first.strategy
            || r.best_per_gen.len() != first.best_per_gen.len()
        {
            return Err(Error::contract(
                "compute_metrics requires runs sharing problem, strategy and maxGen",
            ));
        }
    }
    Ok(max_gen)
}

/// Compute GNTO / SR / SR2 / MBF. `reference_gen` defaults to maxGen, which
/// makes SR2 equal SR; the batch driver passes the minimum finite GNTO
/// across compared cells instead.
pub fn compute_metrics(runs: &[RunRecord], reference_gen: Option<u32>) -> Result<ExperimentResult> {
    let max_gen = check_same_shape(runs)?;
    let reference_gen = reference_gen.unwrap_or(max_gen);
    let n = runs.len();
    let successes = runs.iter().filter(|r| r.first_success_gen.is_some()).count();
    let gnto = if successes == n {
        Gnto::Reached(
            runs.iter()
                .filter_map(|r| r.first_success_gen)
                .max()
                .expect("all runs succeeded"),
        )
    } else {
        Gnto::Exceeded(max_gen)
    };
    let early = runs
        .iter()
        .filter(|r| matches!(r.first_success_gen, Some(g) if g <= reference_gen))
        .count();
    let mbf = runs.iter().map(|r| r.final_best).sum::<f64>() / n as f64;
    Ok(ExperimentResult {
        runs: n,
        gnto,
        sr: 100.0 * successes as f64 / n as f64,
        sr2: 100.0 * early as f64 / n as f64,
        reference_gen,
        mbf,
    })
}

/// Cumulative success percentage per generation; non-decreasing, final
/// point equals SR.
pub fn sr_curve(runs: &[RunRecord]) -> Result<Vec<f64>> {
    let max_gen = check_same_shape(runs)?;
    let n = runs.len() as f64;
    let mut counts = vec![0u32; max_gen as usize + 1];
    for r in runs {
        if let Some(g) = r.first_success_gen {
            counts[g as usize] += 1;
        }
    }
    let mut acc = 0u32;
    Ok(counts
        .into_iter()
        .map(|c| {
            acc += c;
            100.0 * acc as f64 / n
        })
        .collect())
}
