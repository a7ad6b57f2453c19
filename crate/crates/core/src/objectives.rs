//! The five benchmark minimization functions and their metadata.
//!
//! All functions have a global minimum value of 0 (up to floating-point
//! precision of the Schwefel offset constant). Fitness equals the raw
//! function value; lower is better.

use std::f64::consts::PI;

use crate::encoding::{GenotypeLayout, ParamSpec};
use crate::error::{Error, Result};

/// Schwefel offset; the negative of the per-dimension minimum, added to
/// shift the global minimum to (approximately) zero.
pub const SCHWEFEL_V: f64 = 418.9829101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    F2,
    F6,
    F7,
    F8,
    F9,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::F2,
        ProblemId::F6,
        ProblemId::F7,
        ProblemId::F8,
        ProblemId::F9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::F2 => "f2",
            ProblemId::F6 => "f6",
            ProblemId::F7 => "f7",
            ProblemId::F8 => "f8",
            ProblemId::F9 => "f9",
        }
    }

    pub fn parse(s: &str) -> Result<ProblemId> {
        match s {
            "f2" => Ok(ProblemId::F2),
            "f6" => Ok(ProblemId::F6),
            "f7" => Ok(ProblemId::F7),
            "f8" => Ok(ProblemId::F8),
            "f9" => Ok(ProblemId::F9),
            other => Err(Error::config(format!(
                "unknown problem `{other}` (allowed: f2, f6, f7, f8, f9)"
            ))),
        }
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Objective function descriptor: dimension, bounds, bits per parameter,
/// known optimum and the success threshold used by the run drivers.
#[derive(Debug, Clone)]
pub struct Problem {
    pub id: ProblemId,
    pub dim: usize,
    pub spec: ParamSpec,
    pub known_optimum_point: Vec<f64>,
    pub known_optimum_value: f64,
    pub success_threshold: f64,
}

impl Problem {
    /// Standard instance: dimension/range per the benchmark definitions,
    /// bits per parameter chosen so the genotype sizes are 40/80/200/200/150.
    pub fn standard(id: ProblemId) -> Problem {
        let (dim, a, b, n_bits, opt): (usize, f64, f64, u32, f64) = match id {
            ProblemId::F2 => (2, -2.048, 2.048, 20, 1.0),
            ProblemId::F6 => (2, -100.0, 100.0, 40, 0.0),
            ProblemId::F7 => (20, -5.12, 5.12, 10, 0.0),
            ProblemId::F8 => (10, -600.0, 600.0, 20, 0.0),
            ProblemId::F9 => (10, -500.0, 500.0, 15, 420.9687),
        };
        Problem::with_bits(id, dim, a, b, n_bits, opt)
    }

    pub fn with_bits(
        id: ProblemId,
        dim: usize,
        a: f64,
        b: f64,
        n_bits: u32,
        opt_coord: f64,
    ) -> Problem {
        let spec = ParamSpec::new(a, b, n_bits).expect("valid problem bounds");
        let mut p = Problem {
            id,
            dim,
            spec,
            known_optimum_point: vec![opt_coord; dim],
            known_optimum_value: 0.0,
            success_threshold: 0.0,
        };
        // A run succeeds when best fitness drops to at most twice the best
        // value the N-bit grid can attain near the optimum; floor 1e-6.
        p.success_threshold = (2.0 * p.discretization_floor()).max(1e-6);
        p
    }

    /// Variant with a non-standard bit budget (landscape census use).
    pub fn with_census_bits(id: ProblemId, n_bits: u32) -> Problem {
        let std = Problem::standard(id);
        Problem::with_bits(
            id,
            std.dim,
            std.spec.a,
            std.spec.b,
            n_bits,
            std.known_optimum_point[0],
        )
    }

    pub fn layout(&self) -> GenotypeLayout {
        GenotypeLayout::new(self.dim, self.spec).expect("valid layout")
    }

    pub fn vec_size(&self) -> usize {
        self.dim * self.spec.n_bits as usize
    }

    /// Function value at `x`. Lower is better; the global minimum is 0
    /// (F9: near 0, limited by the precision of `V`).
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::contract(format!(
                "{} expects dimension {}, got {}",
                self.id,
                self.dim,
                x.len()
            )));
        }
        Ok(match self.id {
            ProblemId::F2 => {
                let (x1, x2) = (x[0], x[1]);
                100.0 * (x1 * x1 - x2).powi(2) + (1.0 - x1).powi(2)
            }
            ProblemId::F6 => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                0.5 + (r2.sqrt().sin().powi(2) - 0.5) / (1.0 + 0.001 * r2).powi(2)
            }
            ProblemId::F7 => {
                200.0
                    + x.iter()
                        .map(|&v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            ProblemId::F8 => {
                let sum: f64 = x.iter().map(|&v| v * v / 4000.0).sum();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + sum - prod
            }
            ProblemId::F9 => {
                10.0 * SCHWEFEL_V + x.iter().map(|&v| -v * v.abs().sqrt().sin()).sum::<f64>()
            }
        })
    }

    /// Best value attainable on the decoding grid near the known optimum:
    /// evaluates the grid point nearest (per coordinate, in index space)
    /// to the known optimum point.
    pub fn discretization_floor(&self) -> f64 {
        let g: Vec<f64> = self
            .known_optimum_point
            .iter()
            .map(|&x| self.spec.value_at(self.spec.nearest_index(x)))
            .collect();
        self.evaluate(&g).expect("dimension matches")
    }
}
