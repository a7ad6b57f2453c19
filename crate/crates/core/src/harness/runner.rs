//! Batch execution and CSV emission.
//!
//! For each cell the driver executes R independently seeded runs (seed
//! derivation in [`crate::seeds`]), then writes per-cell `results.csv`,
//! `summary.csv` and `sr_curve.csv`, plus a batch-level `ttest.csv`
//! comparing every dual-coding Split-and-Merge cell against the other
//! cells on the same problem. Output is deterministic; the timestamp
//! header line can be suppressed for byte-identical reruns.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::{BatchConfig, CellSpec};
use crate::harness::metrics::{compute_metrics, sr_curve, ExperimentResult, Gnto};
use crate::harness::stats::{format_t, t_test};
use crate::seeds;
use crate::strategies::{self, RunRecord, StrategyVariant};

/// Results for one executed cell.
#[derive(Debug)]
pub struct CellOutcome {
    pub spec: CellSpec,
    pub runs: Vec<RunRecord>,
    pub result: ExperimentResult,
}

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub include_timestamp: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Execute one cell's R runs with derived seeds.
pub fn run_cell(cell: &CellSpec, runs: u32, root_seed: u64) -> Result<Vec<RunRecord>> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::run_seed(root_seed, cell.problem.id.as_str(), &cell.name, i);
            strategies::run(&cell.problem, &cell.params, &cell.strategy, seed)
        })
        .collect()
}

fn is_dual_smga(spec: &CellSpec) -> bool {
    spec.strategy.variant == StrategyVariant::Smga && spec.strategy.coding1 != spec.strategy.coding2
}

/// Reference generation for SR2: the configured override, else the minimum
/// finite GNTO among the given cells, else the cell's own maxGen.
fn reference_for(
    config: &BatchConfig,
    outcomes: &[(CellSpec, Vec<RunRecord>)],
    problem: crate::objectives::ProblemId,
    own_max_gen: u32,
) -> u32 {
    if let Some(r) = config.reference_gen {
        return r;
    }
    outcomes
        .iter()
        .filter(|(spec, _)| spec.problem.id == problem)
        .filter_map(|(_, runs)| match compute_metrics(runs, None) {
            Ok(m) => match m.gnto {
                Gnto::Reached(g) => Some(g),
                Gnto::Exceeded(_) => None,
            },
            Err(_) => None,
        })
        .min()
        .unwrap_or(own_max_gen)
}

fn metadata_lines(config: &BatchConfig, spec: &CellSpec, opts: &RunOptions) -> Vec<String> {
    let s = &spec.strategy;
    let p = &spec.params;
    let mut lines = vec![
        format!("# cell = {}", spec.name),
        format!("# problem = {}", spec.problem.id),
        format!("# strategy = {}", s.label()),
        format!("# runs = {}", config.runs),
        format!("# root_seed = {}", config.root_seed),
        format!(
            "# seed_derivation = splitmix64 chain over (root_seed, fnv1a(problem), fnv1a(cell), run_index)"
        ),
        format!("# rng = chacha8"),
        format!(
            "# max_gen = {} pop_size = {} vec_size = {} t_size = {}",
            p.max_gen, p.pop_size, p.vec_size, p.t_size
        ),
        format!(
            "# p_cross = {} one_point_rate = {} p_mut = {} p_mut_per_bit = {}",
            p.p_cross, p.one_point_rate, p.p_mut, p.p_mut_per_bit
        ),
        format!("# elitism = {}", p.elitism),
        format!(
            "# success_threshold = {} (max(1e-6, 2 * discretization floor))",
            spec.problem.success_threshold
        ),
        "# mbf_source = final-generation best fitness".to_string(),
        "# selection = tournament, distinct picks, min wins, ties to lowest index".to_string(),
    ];
    match s.variant {
        StrategyVariant::Periodic => lines.push(format!("# period = {}", s.period)),
        StrategyVariant::Aperiodic => {
            lines.push(format!("# min_p = {} max_p = {}", s.min_p, s.max_p))
        }
        StrategyVariant::HomogPop => lines.push(format!("# epsilon = {}", s.epsilon)),
        StrategyVariant::SteadyGen => lines.push(format!("# steady_gen = {}", s.steady_gen)),
        StrategyVariant::Smga => lines.push(format!(
            "# start_gen = {} coding1 = {} coding2 = {}",
            s.start_gen, s.coding1, s.coding2
        )),
        _ => {}
    }
    if opts.include_timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        lines.push(format!("# written_at_unix = {now}"));
    }
    lines
}

fn write_csv(path: &Path, meta: &[String], header: &str, rows: &[String]) -> Result<()> {
    let mut out = String::new();
    for m in meta {
        out.push_str(m);
        out.push('\n');
    }
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(out.as_bytes()).map_err(io_err(path))
}

fn fmt_opt_gen(g: Option<u32>) -> String {
    g.map(|v| v.to_string()).unwrap_or_default()
}

/// Execute every cell and write all output files. Returns the outcomes in
/// config order.
pub fn run_experiment(config: &BatchConfig, opts: &RunOptions) -> Result<Vec<CellOutcome>> {
    fs::create_dir_all(&opts.out_dir).map_err(io_err(&opts.out_dir))?;

    let mut executed: Vec<(CellSpec, Vec<RunRecord>)> = Vec::new();
    for cell in &config.cells {
        let runs = run_cell(cell, config.runs, config.root_seed)?;
        executed.push((cell.clone(), runs));
    }

    let mut outcomes = Vec::with_capacity(executed.len());
    for (spec, runs) in &executed {
        let reference = reference_for(config, &executed, spec.problem.id, spec.params.max_gen);
        let result = compute_metrics(runs, Some(reference))?;
        let meta = metadata_lines(config, spec, opts);

        let cell_dir = opts.out_dir.join(&spec.name);
        fs::create_dir_all(&cell_dir).map_err(io_err(&cell_dir))?;

        let rows: Vec<String> = runs
            .iter()
            .enumerate()
            .map(|(i, r)| {
                format!(
                    "{i},{},{},{},{}",
                    r.seed,
                    fmt_opt_gen(r.first_success_gen),
                    r.final_best,
                    r.evaluations
                )
            })
            .collect();
        write_csv(
            &cell_dir.join("results.csv"),
            &meta,
            "run_index,seed,first_success_gen,final_best,evaluations",
            &rows,
        )?;

        let summary_row = format!(
            "{},{},{},{},{},{},{},{}",
            spec.name,
            spec.problem.id,
            spec.strategy.label(),
            result.runs,
            result.gnto,
            result.sr,
            result.sr2,
            result.mbf
        );
        let mut meta_ref = meta.clone();
        meta_ref.push(format!("# reference_gen = {reference}"));
        write_csv(
            &cell_dir.join("summary.csv"),
            &meta_ref,
            "cell,problem,strategy,runs,gnto,sr,sr2,mbf",
            &[summary_row],
        )?;

        let curve = sr_curve(runs)?;
        let curve_rows: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(g, sr)| format!("{g},{sr}"))
            .collect();
        write_csv(
            &cell_dir.join("sr_curve.csv"),
            &meta,
            "generation,sr",
            &curve_rows,
        )?;

        outcomes.push(CellOutcome {
            spec: spec.clone(),
            runs: runs.clone(),
            result,
        });
    }

    write_ttest_file(config, &executed, opts)?;
    Ok(outcomes)
}

/// Per-run samples for the two tested metrics.
fn samples(runs: &[RunRecord], reference: u32) -> (Vec<f64>, Vec<f64>) {
    let sr2: Vec<f64> = runs
        .iter()
        .map(|r| match r.first_success_gen {
            Some(g) if g <= reference => 1.0,
            _ => 0.0,
        })
        .collect();
    let mbf: Vec<f64> = runs.iter().map(|r| r.final_best).collect();
    (sr2, mbf)
}

fn write_ttest_file(
    config: &BatchConfig,
    executed: &[(CellSpec, Vec<RunRecord>)],
    opts: &RunOptions,
) -> Result<()> {
    // The t-test needs two observations per sample; single-run batches are
    // legitimate smoke tests, so skip the file rather than fail the batch.
    let smga_cells: Vec<&(CellSpec, Vec<RunRecord>)> =
        executed.iter().filter(|(s, _)| is_dual_smga(s)).collect();
    if smga_cells.is_empty() || config.runs < 2 {
        return Ok(());
    }

    let mut rows = Vec::new();
    for (smga_spec, smga_runs) in &smga_cells {
        for (other_spec, other_runs) in executed {
            if other_spec.name == smga_spec.name || other_spec.problem.id != smga_spec.problem.id {
                continue;
            }
            let reference = reference_for(
                config,
                executed,
                smga_spec.problem.id,
                smga_spec.params.max_gen,
            );
            let (a_sr2, a_mbf) = samples(smga_runs, reference);
            let (b_sr2, b_mbf) = samples(other_runs, reference);
            for (metric, a, b) in [("sr2", &a_sr2, &b_sr2), ("mbf", &a_mbf, &b_mbf)] {
                let r = t_test(a, b)?;
                rows.push(format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    smga_spec.problem.id,
                    smga_spec.name,
                    other_spec.name,
                    metric,
                    format_t(r.t),
                    r.n1,
                    r.n2,
                    r.df,
                    r.significant_p05 as u8,
                    r.significant_p01 as u8,
                    r.significant_p001 as u8,
                ));
            }
        }
    }

    let mut meta = vec![
        "# t-test: two-sample pooled-variance Student".to_string(),
        "# critical values: 1.96 (p=0.05), 2.58 (p=0.01), 3.29 (p=0.001)".to_string(),
        "# sr2 samples are per-run 0/1 success indicators at the reference generation".to_string(),
        "# mbf samples are per-run final-generation best fitnesses".to_string(),
    ];
    if opts.include_timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta.push(format!("# written_at_unix = {now}"));
    }
    write_csv(
        &opts.out_dir.join("ttest.csv"),
        &meta,
        "problem,cell_a,cell_b,metric,t,n1,n2,df,sig_p05,sig_p01,sig_p001",
        &rows,
    )
}
