//! Command-line interface: experiment batches, single benchmark runs,
//! landscape census and t-tests over result files.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dualga::encoding::Coding;
use dualga::engine::GaParams;
use dualga::error::{Error, Result};
use dualga::harness::config::load_config;
use dualga::harness::runner::{run_experiment, RunOptions};
use dualga::harness::stats::{format_t, t_test};
use dualga::landscape::{double_local_optima, enumerate_local_optima, DEFAULT_BUDGET_BITS};
use dualga::objectives::{Problem, ProblemId};
use dualga::strategies::{self, StrategyConfig, StrategyVariant, TraceKind};

#[derive(Parser)]
#[command(name = "dualga", version, about = "Dual-encoding GA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment batch from a config file and write CSV results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the number of runs per cell.
        #[arg(long)]
        runs: Option<u32>,
        /// Omit the timestamp header line for byte-identical reruns.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Execute a single seeded run and print its summary.
    Bench {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        strategy: String,
        /// Starter coding for static/serial strategies.
        #[arg(long, default_value = "sc")]
        starter: String,
        /// Sub-population codings for smga.
        #[arg(long, default_value = "sc")]
        coding1: String,
        #[arg(long, default_value = "gc")]
        coding2: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        max_gen: Option<u32>,
        #[arg(long)]
        pop_size: Option<usize>,
    },
    /// Exhaustively enumerate Hamming-1 local optima and write a CSV report.
    Landscape {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        bits_per_param: u32,
        /// sc, gc, or both.
        #[arg(long, default_value = "both")]
        coding: String,
        #[arg(long)]
        out: PathBuf,
        /// Total-genotype-bits enumeration budget.
        #[arg(long, default_value_t = DEFAULT_BUDGET_BITS)]
        budget_bits: u32,
    },
    /// Pooled-variance Student's t-test between two results.csv files.
    Ttest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// sr2 or mbf.
        #[arg(long)]
        metric: String,
        /// Reference generation for the sr2 indicator samples.
        #[arg(long)]
        reference_gen: Option<u32>,
    },
}

fn cmd_run(config: PathBuf, out: PathBuf, runs: Option<u32>, no_timestamp: bool) -> Result<()> {
    let mut batch = load_config(&config, None)?;
    if let Some(r) = runs {
        if r == 0 {
            return Err(Error::config("--runs must be >= 1"));
        }
        batch.runs = r;
    }
    let opts = RunOptions {
        out_dir: out.clone(),
        include_timestamp: !no_timestamp,
    };
    let outcomes = run_experiment(&batch, &opts)?;
    for o in &outcomes {
        println!(
            "{:<24} {:<4} gnto={:<8} sr={:<6} sr2={:<6} mbf={}",
            o.spec.name,
            o.spec.problem.id,
            o.result.gnto.to_string(),
            o.result.sr,
            o.result.sr2,
            o.result.mbf
        );
    }
    println!("results written to {}", out.display());
    Ok(())
}

fn cmd_bench(
    problem: String,
    strategy: String,
    starter: String,
    coding1: String,
    coding2: String,
    seed: u64,
    max_gen: Option<u32>,
    pop_size: Option<usize>,
) -> Result<()> {
    let problem = Problem::standard(ProblemId::parse(&problem)?);
    let mut params = GaParams::standard(&problem);
    if let Some(g) = max_gen {
        params.max_gen = g;
    }
    if let Some(p) = pop_size {
        params.pop_size = p;
    }
    let variant = StrategyVariant::parse(&strategy)?;
    let mut cfg = StrategyConfig::standard(variant, problem.id);
    cfg.starter = Coding::parse(&starter)?;
    cfg.coding1 = Coding::parse(&coding1)?;
    cfg.coding2 = Coding::parse(&coding2)?;

    let rec = strategies::run(&problem, &params, &cfg, seed)?;
    println!("strategy        = {}", rec.strategy);
    println!("problem         = {}", rec.problem);
    println!("seed            = {}", rec.seed);
    println!("generations     = {}", rec.best_per_gen.len() - 1);
    println!("final_best      = {}", rec.final_best);
    println!(
        "first_success   = {}",
        rec.first_success_gen
            .map(|g| g.to_string())
            .unwrap_or_else(|| "-".to_string())
    );
    println!("evaluations     = {}", rec.evaluations);
    println!(
        "alternations    = {}",
        rec.trace
            .iter()
            .filter(|e| e.kind == TraceKind::Alternation)
            .count()
    );
    println!(
        "splits/merges   = {}/{}",
        rec.trace.iter().filter(|e| e.kind == TraceKind::Split).count(),
        rec.trace.iter().filter(|e| e.kind == TraceKind::Merge).count()
    );
    Ok(())
}

fn cmd_landscape(
    problem: String,
    bits_per_param: u32,
    coding: String,
    out: PathBuf,
    budget_bits: u32,
) -> Result<()> {
    let problem = Problem::with_census_bits(ProblemId::parse(&problem)?, bits_per_param);
    let (want_sc, want_gc) = match coding.as_str() {
        "sc" => (true, false),
        "gc" => (false, true),
        "both" => (true, true),
        other => {
            return Err(Error::config(format!(
                "unknown coding `{other}` (allowed: sc, gc, both)"
            )))
        }
    };

    let sc = want_sc
        .then(|| enumerate_local_optima(&problem, Coding::StandardBinary, budget_bits))
        .transpose()?;
    let gc = want_gc
        .then(|| enumerate_local_optima(&problem, Coding::Gray, budget_bits))
        .transpose()?;

    let sc_set = sc.as_ref().map(|r| r.phenotype_indices());
    let gc_set = gc.as_ref().map(|r| r.phenotype_indices());

    // Union of optima in phenotype space, one row per point.
    let mut union: Vec<u64> = Vec::new();
    for set in [&sc_set, &gc_set].into_iter().flatten() {
        union.extend(set.iter().copied());
    }
    union.sort_unstable();
    union.dedup();

    let coord_header = if problem.dim == 2 {
        "x,y".to_string()
    } else {
        (0..problem.dim)
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut text = String::new();
    text.push_str(&format!(
        "# problem = {} bits_per_param = {} coding = {}\n",
        problem.id, bits_per_param, coding
    ));
    if let Some(r) = &sc {
        text.push_str(&format!("# sc_count = {}\n", r.count()));
    }
    if let Some(r) = &gc {
        text.push_str(&format!("# gc_count = {}\n", r.count()));
    }
    if let (Some(a), Some(b)) = (&sc, &gc) {
        text.push_str(&format!(
            "# double_count = {}\n",
            double_local_optima(a, b)?.len()
        ));
    }
    text.push_str(&format!("index,{coord_header},fitness,is_sc_opt,is_gc_opt\n"));

    let mask = (1u64 << bits_per_param) - 1;
    for idx in union {
        let x: Vec<f64> = (0..problem.dim)
            .map(|i| problem.spec.value_at((idx >> (i as u32 * bits_per_param)) & mask))
            .collect();
        let fitness = problem.evaluate(&x)?;
        let flag = |set: &Option<std::collections::BTreeSet<u64>>| match set {
            Some(s) => {
                if s.contains(&idx) {
                    "1"
                } else {
                    "0"
                }
            }
            None => "",
        };
        let coords = x
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&format!(
            "{idx},{coords},{fitness},{},{}\n",
            flag(&sc_set),
            flag(&gc_set)
        ));
    }
    fs::write(&out, text).map_err(|source| Error::Io {
        path: out.display().to_string(),
        source,
    })?;

    if let Some(r) = &sc {
        println!("sc local optima: {}", r.count());
    }
    if let Some(r) = &gc {
        println!("gc local optima: {}", r.count());
    }
    if let (Some(a), Some(b)) = (&sc, &gc) {
        println!("double local optima: {}", double_local_optima(a, b)?.len());
    }
    println!("report written to {}", out.display());
    Ok(())
}

/// (first_success_gen, final_best) per run from a results.csv file.
fn read_results(path: &PathBuf) -> Result<Vec<(Option<u32>, f64)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("run_index") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::config(format!(
                "{}: malformed results row `{line}`",
                path.display()
            )));
        }
        let first = if fields[2].is_empty() {
            None
        } else {
            Some(fields[2].parse().map_err(|_| {
                Error::config(format!("{}: bad first_success_gen `{}`", path.display(), fields[2]))
            })?)
        };
        let final_best: f64 = fields[3].parse().map_err(|_| {
            Error::config(format!("{}: bad final_best `{}`", path.display(), fields[3]))
        })?;
        rows.push((first, final_best));
    }
    Ok(rows)
}

fn cmd_ttest(a: PathBuf, b: PathBuf, metric: String, reference_gen: Option<u32>) -> Result<()> {
    let ra = read_results(&a)?;
    let rb = read_results(&b)?;
    let extract = |rows: &[(Option<u32>, f64)]| -> Result<Vec<f64>> {
        match metric.as_str() {
            "mbf" => Ok(rows.iter().map(|&(_, f)| f).collect()),
            "sr2" => {
                let reference = reference_gen.ok_or_else(|| {
                    Error::config("metric sr2 requires --reference-gen")
                })?;
                Ok(rows
                    .iter()
                    .map(|&(first, _)| match first {
                        Some(g) if g <= reference => 1.0,
                        _ => 0.0,
                    })
                    .collect())
            }
            other => Err(Error::config(format!(
                "unknown metric `{other}` (allowed: sr2, mbf)"
            ))),
        }
    };
    let sa = extract(&ra)?;
    let sb = extract(&rb)?;
    let r = t_test(&sa, &sb)?;
    println!("metric = {metric}");
    println!("t      = {}", format_t(r.t));
    println!("n1, n2 = {}, {}", r.n1, r.n2);
    println!("df     = {}", r.df);
    println!("significant: p<0.05 {} | p<0.01 {} | p<0.001 {}",
        r.significant_p05, r.significant_p01, r.significant_p001);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            runs,
            no_timestamp,
        } => cmd_run(config, out, runs, no_timestamp),
        Command::Bench {
            problem,
            strategy,
            starter,
            coding1,
            coding2,
            seed,
            max_gen,
            pop_size,
        } => cmd_bench(problem, strategy, starter, coding1, coding2, seed, max_gen, pop_size),
        Command::Landscape {
            problem,
            bits_per_param,
            coding,
            out,
            budget_bits,
        } => cmd_landscape(problem, bits_per_param, coding, out, budget_bits),
        Command::Ttest {
            a,
            b,
            metric,
            reference_gen,
        } => cmd_ttest(a, b, metric, reference_gen),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
