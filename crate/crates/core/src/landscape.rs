//! Exhaustive enumeration of Hamming-1 local optima per coding.
//!
//! A genotype is a local optimum iff no single-bit flip strictly lowers
//! fitness; plateaus therefore count as optima, matching the alternation
//! predicate used by the local-optimum strategy. Enumeration walks all
//! `2^(n*N)` genotypes, so the bit budget is guarded.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::encoding::Coding;
use crate::error::{Error, Result};
use crate::objectives::{Problem, ProblemId};

/// Default enumeration budget in total genotype bits.
pub const DEFAULT_BUDGET_BITS: u32 = 30;

/// Census result for one problem, resolution and coding.
#[derive(Debug, Clone)]
pub struct LandscapeReport {
    pub problem: ProblemId,
    pub bits_per_param: u32,
    pub coding: Coding,
    /// Genotype integer indices of the local optima (bit `i*N + j` of the
    /// index is bit `j` of parameter block `i`).
    pub local_optima: BTreeSet<u64>,
    /// Decoded parameter vectors, in genotype-index order.
    pub positions: Vec<Vec<f64>>,
}

impl LandscapeReport {
    pub fn count(&self) -> usize {
        self.local_optima.len()
    }

    /// Optima as phenotype (per-block grid index) integers: under SC this is
    /// the genotype index itself; Gray blocks are converted first.
    pub fn phenotype_indices(&self) -> BTreeSet<u64> {
        let problem = Problem::with_census_bits(self.problem, self.bits_per_param);
        self.local_optima
            .iter()
            .map(|&g| genotype_to_phenotype_index(g, &problem, self.coding))
            .collect()
    }
}

fn gray_to_binary(mut k: u64) -> u64 {
    let mut shift = 1;
    while shift < 64 {
        k ^= k >> shift;
        shift <<= 1;
    }
    k
}

/// Map a packed genotype integer to the packed per-block grid-index integer.
fn genotype_to_phenotype_index(genotype: u64, problem: &Problem, coding: Coding) -> u64 {
    let n_bits = problem.spec.n_bits;
    let mask = (1u64 << n_bits) - 1;
    let mut out = 0u64;
    for i in 0..problem.dim {
        let block = (genotype >> (i as u32 * n_bits)) & mask;
        let k = match coding {
            Coding::StandardBinary => block,
            Coding::Gray => gray_to_binary(block),
        };
        out |= k << (i as u32 * n_bits);
    }
    out
}

fn decode_packed(genotype: u64, problem: &Problem, coding: Coding) -> Vec<f64> {
    let n_bits = problem.spec.n_bits;
    let mask = (1u64 << n_bits) - 1;
    (0..problem.dim)
        .map(|i| {
            let block = (genotype >> (i as u32 * n_bits)) & mask;
            let k = match coding {
                Coding::StandardBinary => block,
                Coding::Gray => gray_to_binary(block),
            };
            problem.spec.value_at(k)
        })
        .collect()
}

fn fitness_of(genotype: u64, problem: &Problem, coding: Coding) -> f64 {
    problem
        .evaluate(&decode_packed(genotype, problem, coding))
        .expect("dimension matches")
}

/// Visit all genotypes of `problem` at its bit resolution and collect the
/// Hamming-1 local optima under `coding`.
pub fn enumerate_local_optima(
    problem: &Problem,
    coding: Coding,
    budget_bits: u32,
) -> Result<LandscapeReport> {
    let total_bits = problem.vec_size() as u32;
    if total_bits > budget_bits {
        return Err(Error::contract(format!(
            "enumeration needs {total_bits} bits but the budget is {budget_bits}; \
             raise the budget to at least {total_bits} to run this census"
        )));
    }
    let space = 1u64 << total_bits;

    // Chunked scan; order does not affect the resulting set.
    let chunk = 1u64 << total_bits.min(16);
    let optima: BTreeSet<u64> = (0..space.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(space);
            (lo..hi).filter(|&g| {
                let f = fitness_of(g, problem, coding);
                (0..total_bits).all(|b| fitness_of(g ^ (1 << b), problem, coding) >= f)
            })
        })
        .collect();

    let positions = optima
        .iter()
        .map(|&g| decode_packed(g, problem, coding))
        .collect();
    Ok(LandscapeReport {
        problem: problem.id,
        bits_per_param: problem.spec.n_bits,
        coding,
        local_optima: optima,
        positions,
    })
}

/// Phenotype index of the grid point with minimal fitness (first such index
/// on ties). This point is a local optimum under every coding.
pub fn grid_global_minimum(problem: &Problem) -> u64 {
    let total_bits = problem.vec_size() as u32;
    let space = 1u64 << total_bits;
    let mut best = 0u64;
    let mut best_f = f64::INFINITY;
    for g in 0..space {
        let f = fitness_of(g, problem, Coding::StandardBinary);
        if f < best_f {
            best_f = f;
            best = g;
        }
    }
    best
}

/// Intersection of two reports' optimum sets, compared in phenotype space.
pub fn double_local_optima(
    rep_a: &LandscapeReport,
    rep_b: &LandscapeReport,
) -> Result<BTreeSet<u64>> {
    if rep_a.problem != rep_b.problem || rep_a.bits_per_param != rep_b.bits_per_param {
        return Err(Error::contract(format!(
            "double_local_optima requires matching problem and resolution, got {}/{} vs {}/{}",
            rep_a.problem, rep_a.bits_per_param, rep_b.problem, rep_b.bits_per_param
        )));
    }
    let a = rep_a.phenotype_indices();
    let b = rep_b.phenotype_indices();
    Ok(a.intersection(&b).copied().collect())
}
