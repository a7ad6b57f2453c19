//! The encoding-change strategies: a static single-coding baseline, five
//! serial alternation schemes (periodic, aperiodic, local-optimum,
//! homogeneous-population, steady-generation) and the parallel
//! Split-and-Merge GA.
//!
//! Every strategy produces a [`RunRecord`] carrying the best-so-far fitness
//! per generation, the first generation at which the run crossed the
//! problem's success threshold, an evaluation count and an audit trace of
//! coding changes, splits and merges.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::{decode_genotype, Coding, GenotypeLayout};
use crate::engine::{
    best_element, best_fitness, convert_population, fitness_stats, generate_initial_population,
    step_generation, GaParams, Individual, Population, RunState,
};
use crate::error::{Error, Result};
use crate::objectives::{Problem, ProblemId};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyVariant {
    Static,
    Periodic,
    Aperiodic,
    LocalOpt,
    HomogPop,
    SteadyGen,
    Smga,
}

impl StrategyVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyVariant::Static => "static",
            StrategyVariant::Periodic => "periodic",
            StrategyVariant::Aperiodic => "aperiodic",
            StrategyVariant::LocalOpt => "localopt",
            StrategyVariant::HomogPop => "homogpop",
            StrategyVariant::SteadyGen => "steadygen",
            StrategyVariant::Smga => "smga",
        }
    }

    pub fn parse(s: &str) -> Result<StrategyVariant> {
        match s {
            "static" => Ok(StrategyVariant::Static),
            "periodic" => Ok(StrategyVariant::Periodic),
            "aperiodic" => Ok(StrategyVariant::Aperiodic),
            "localopt" => Ok(StrategyVariant::LocalOpt),
            "homogpop" => Ok(StrategyVariant::HomogPop),
            "steadygen" => Ok(StrategyVariant::SteadyGen),
            "smga" => Ok(StrategyVariant::Smga),
            other => Err(Error::config(format!(
                "unknown strategy `{other}` (allowed: static, periodic, aperiodic, localopt, homogpop, steadygen, smga)"
            ))),
        }
    }
}

/// Strategy variant plus its specific parameters. Defaults per problem come
/// from [`StrategyConfig::standard`].
#[derive(Debug, Clone)]
pub struct StrategyConfig {
    pub variant: StrategyVariant,
    /// Starter coding for static and serial strategies.
    pub starter: Coding,
    /// Sub-population codings for the Split-and-Merge GA.
    pub coding1: Coding,
    pub coding2: Coding,
    pub period: u32,
    pub min_p: u32,
    pub max_p: u32,
    pub epsilon: f64,
    pub steady_gen: u32,
    pub start_gen: u32,
}

impl StrategyConfig {
    /// Standard per-problem parameter values.
    pub fn standard(variant: StrategyVariant, problem: ProblemId) -> StrategyConfig {
        let (period, min_p, max_p, epsilon, steady_gen, start_gen) = match problem {
            ProblemId::F2 => (50, 25, 75, 5.0, 35, 250),
            ProblemId::F6 => (40, 25, 70, 0.1, 25, 500),
            ProblemId::F7 => (25, 20, 50, 5.0, 5, 100),
            ProblemId::F8 => (30, 20, 70, 2.5, 25, 250),
            ProblemId::F9 => (10, 10, 20, 1.0, 5, 250),
        };
        StrategyConfig {
            variant,
            starter: Coding::StandardBinary,
            coding1: Coding::StandardBinary,
            coding2: Coding::Gray,
            period,
            min_p,
            max_p,
            epsilon,
            steady_gen,
            start_gen,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            StrategyVariant::Periodic if self.period < 1 => {
                Err(Error::config("period must be >= 1"))
            }
            StrategyVariant::Aperiodic if self.min_p < 1 || self.min_p > self.max_p => {
                Err(Error::config(format!(
                    "aperiodic requires 1 <= min_p <= max_p, got [{}:{}]",
                    self.min_p, self.max_p
                )))
            }
            StrategyVariant::HomogPop if self.epsilon < 0.0 => {
                Err(Error::config("epsilon must be >= 0"))
            }
            StrategyVariant::SteadyGen if self.steady_gen < 1 => {
                Err(Error::config("steady_gen must be >= 1"))
            }
            StrategyVariant::Smga if self.start_gen < 1 => {
                Err(Error::config("start_gen must be >= 1"))
            }
            _ => Ok(()),
        }
    }

    /// Short identifier in the result tables' style, e.g. `sga_gc`,
    /// `periodic_sg`, `smga`.
    pub fn label(&self) -> String {
        match self.variant {
            StrategyVariant::Static => format!("sga_{}", self.starter),
            StrategyVariant::Smga => match (self.coding1, self.coding2) {
                (Coding::StandardBinary, Coding::StandardBinary) => "smga_sc".to_string(),
                (Coding::Gray, Coding::Gray) => "smga_gc".to_string(),
                _ => "smga".to_string(),
            },
            v => {
                let order = match self.starter {
                    Coding::StandardBinary => "sg",
                    Coding::Gray => "gs",
                };
                format!("{}_{order}", v.as_str())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Alternation,
    Split,
    Merge,
    SteadyDetected,
    LocalOptimumDetected,
    CodingSelected,
}

impl TraceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::Alternation => "alternation",
            TraceKind::Split => "split",
            TraceKind::Merge => "merge",
            TraceKind::SteadyDetected => "steady_detected",
            TraceKind::LocalOptimumDetected => "local_optimum_detected",
            TraceKind::CodingSelected => "coding_selected",
        }
    }
}

/// One audit-trail event: what happened at which generation and which
/// coding was in force afterwards.
#[derive(Debug, Clone)]
pub struct TraceEvent {
    pub generation: u32,
    pub kind: TraceKind,
    pub coding_after: Coding,
    pub detail: String,
}

/// Per-run output common to all strategies.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub strategy: String,
    pub problem: ProblemId,
    /// Best-so-far fitness indexed by generation, length `max_gen + 1`.
    pub best_per_gen: Vec<f64>,
    pub first_success_gen: Option<u32>,
    pub final_best: f64,
    pub evaluations: u64,
    pub trace: Vec<TraceEvent>,
}

/// Steady-state episode statistics for one coding over a startGen window.
#[derive(Debug, Clone)]
pub struct SteadyStateEstimate {
    pub coding: Coding,
    pub episode_lengths: Vec<u32>,
    pub estimate: u32,
}

/// True iff no single-bit flip of the genotype (under the population's
/// current coding) yields strictly lower fitness. Costs one evaluation per
/// bit, which the caller charges to the run's evaluation counter.
pub fn is_local_optimum(
    ind: &Individual,
    coding: Coding,
    problem: &Problem,
    layout: &GenotypeLayout,
) -> Result<bool> {
    let mut g = ind.genotype.clone();
    for i in 0..g.len() {
        g.flip(i);
        let x = decode_genotype(&g, layout, coding)?;
        let f = problem.evaluate(&x)?;
        g.flip(i);
        if f < ind.fitness {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniformly random partition of an even-sized population into two halves.
pub fn split(pop: &Population, rng: &mut impl Rng) -> Result<(Population, Population)> {
    if pop.size() % 2 != 0 {
        return Err(Error::contract(format!(
            "split requires an even population size, got {}",
            pop.size()
        )));
    }
    let mut order: Vec<usize> = (0..pop.size()).collect();
    order.shuffle(rng);
    let half = pop.size() / 2;
    let take = |ix: &[usize]| Population {
        members: ix.iter().map(|&i| pop.members[i].clone()).collect(),
        coding: pop.coding,
    };
    Ok((take(&order[..half]), take(&order[half..])))
}

/// Concatenate two same-coding populations.
pub fn merge(pop1: Population, pop2: Population) -> Result<Population> {
    if pop1.coding != pop2.coding {
        return Err(Error::contract(format!(
            "merge requires matching codings, got {} and {}",
            pop1.coding, pop2.coding
        )));
    }
    let mut members = pop1.members;
    members.extend(pop2.members);
    Ok(Population {
        members,
        coding: pop1.coding,
    })
}

/// Average inter-improvement gap over a window of `window` generations.
///
/// Episodes are the gaps between consecutive strict improvements (the first
/// gap is measured from the window start); only completed episodes count.
/// The estimate is the mean rounded half up, floored at 1; with no completed
/// episode it falls back to the window length.
pub fn compute_steady_state(
    coding: Coding,
    improvement_gens: &[u32],
    window: u32,
) -> SteadyStateEstimate {
    let mut episodes = Vec::with_capacity(improvement_gens.len());
    let mut prev = 0u32;
    for &g in improvement_gens {
        if g > window {
            break;
        }
        episodes.push(g - prev);
        prev = g;
    }
    let estimate = if episodes.is_empty() {
        window
    } else {
        let sum: u64 = episodes.iter().map(|&e| e as u64).sum();
        let n = episodes.len() as u64;
        // round half up
        (((2 * sum + n) / (2 * n)) as u32).max(1)
    };
    SteadyStateEstimate {
        coding,
        episode_lengths: episodes,
        estimate,
    }
}

/// Coding of the population with strictly lower mean fitness; tie goes to
/// `coding1`.
pub fn select_best_coding(
    pop1: &Population,
    coding1: Coding,
    pop2: &Population,
    coding2: Coding,
) -> Result<Coding> {
    let (m1, _) = fitness_stats(pop1)?;
    let (m2, _) = fitness_stats(pop2)?;
    Ok(if m2 < m1 { coding2 } else { coding1 })
}

/// Shared run bookkeeping across all strategy drivers.
struct Driver<'a> {
    problem: &'a Problem,
    params: &'a GaParams,
    layout: GenotypeLayout,
    ga_rng: ChaCha8Rng,
    sched_rng: ChaCha8Rng,
    generation: u32,
    best_per_gen: Vec<f64>,
    first_success: Option<u32>,
    evaluations: u64,
    trace: Vec<TraceEvent>,
}

impl<'a> Driver<'a> {
    fn new(problem: &'a Problem, params: &'a GaParams, seed: u64) -> Result<Driver<'a>> {
        params.validate()?;
        if params.vec_size != problem.vec_size() {
            return Err(Error::config(format!(
                "vec_size {} does not match problem genotype size {}",
                params.vec_size,
                problem.vec_size()
            )));
        }
        Ok(Driver {
            problem,
            params,
            layout: problem.layout(),
            ga_rng: ChaCha8Rng::seed_from_u64(seed),
            sched_rng: ChaCha8Rng::seed_from_u64(seeds::sched_seed(seed)),
            generation: 0,
            best_per_gen: Vec::with_capacity(params.max_gen as usize + 1),
            first_success: None,
            evaluations: 0,
            trace: Vec::new(),
        })
    }

    fn init_population(&mut self, coding: Coding) -> Result<(Population, RunState)> {
        let pop =
            generate_initial_population(self.problem, self.params, coding, &mut self.ga_rng)?;
        self.evaluations += pop.size() as u64;
        let best = best_fitness(&pop)?;
        let state = RunState::new(best, self.evaluations);
        self.record_best(best);
        Ok((pop, state))
    }

    /// Record the best-so-far value for the current generation and check
    /// the success threshold.
    fn record_best(&mut self, candidate: f64) {
        let best = match self.best_per_gen.last() {
            Some(&prev) => prev.min(candidate),
            None => candidate,
        };
        self.best_per_gen.push(best);
        if self.first_success.is_none() && best <= self.problem.success_threshold {
            self.first_success = Some(self.generation);
        }
    }

    fn event(&mut self, kind: TraceKind, coding_after: Coding, detail: String) {
        self.trace.push(TraceEvent {
            generation: self.generation,
            kind,
            coding_after,
            detail,
        });
    }

    /// One generation of the merged/serial population.
    fn tick_single(&mut self, pop: &mut Population, state: &mut RunState) -> Result<()> {
        self.evaluations += step_generation(pop, self.problem, self.params, &mut self.ga_rng)?;
        self.generation += 1;
        let best = best_fitness(pop)?;
        state.observe_generation(best);
        state.evaluations = self.evaluations;
        self.record_best(best);
        Ok(())
    }

    /// One global tick advancing both halves (half 1 first).
    fn tick_halves(
        &mut self,
        pop1: &mut Population,
        state1: &mut RunState,
        pop2: &mut Population,
        state2: &mut RunState,
    ) -> Result<()> {
        self.evaluations += step_generation(pop1, self.problem, self.params, &mut self.ga_rng)?;
        self.evaluations += step_generation(pop2, self.problem, self.params, &mut self.ga_rng)?;
        self.generation += 1;
        let b1 = best_fitness(pop1)?;
        let b2 = best_fitness(pop2)?;
        state1.observe_generation(b1);
        state2.observe_generation(b2);
        self.record_best(b1.min(b2));
        Ok(())
    }

    fn finish(self, seed: u64, strategy: String) -> RunRecord {
        let final_best = *self.best_per_gen.last().expect("at least generation 0");
        RunRecord {
            seed,
            strategy,
            problem: self.problem.id,
            best_per_gen: self.best_per_gen,
            first_success_gen: self.first_success,
            final_best,
            evaluations: self.evaluations,
            trace: self.trace,
        }
    }
}

/// Plain SGA with a fixed coding.
pub fn run_static(
    problem: &Problem,
    params: &GaParams,
    coding: Coding,
    seed: u64,
) -> Result<RunRecord> {
    let mut cfg = StrategyConfig::standard(StrategyVariant::Static, problem.id);
    cfg.starter = coding;
    run(problem, params, &cfg, seed)
}

fn run_serial(
    problem: &Problem,
    params: &GaParams,
    cfg: &StrategyConfig,
    seed: u64,
) -> Result<RunRecord> {
    let mut driver = Driver::new(problem, params, seed)?;
    let mut coding = cfg.starter;
    let (mut pop, mut state) = driver.init_population(coding)?;

    // Leg bookkeeping for the period-based variants.
    let mut leg_len: u32 = 0;
    let mut leg_target: u32 = match cfg.variant {
        StrategyVariant::Periodic => cfg.period,
        StrategyVariant::Aperiodic => driver.sched_rng.gen_range(cfg.min_p..=cfg.max_p),
        _ => 0,
    };

    while driver.generation < params.max_gen {
        driver.tick_single(&mut pop, &mut state)?;
        leg_len += 1;
        if driver.generation >= params.max_gen {
            break;
        }

        let alternate = match cfg.variant {
            StrategyVariant::Static => false,
            StrategyVariant::Periodic | StrategyVariant::Aperiodic => leg_len >= leg_target,
            StrategyVariant::LocalOpt => {
                let best = best_element(&pop)?.clone();
                driver.evaluations += params.vec_size as u64;
                let hit = is_local_optimum(&best, coding, problem, &driver.layout)?;
                if hit {
                    driver.event(
                        TraceKind::LocalOptimumDetected,
                        coding,
                        format!("best fitness {}", best.fitness),
                    );
                }
                hit
            }
            StrategyVariant::HomogPop => {
                let (_, stddev) = fitness_stats(&pop)?;
                stddev <= cfg.epsilon
            }
            StrategyVariant::SteadyGen => state.stagnation_counter >= cfg.steady_gen,
            StrategyVariant::Smga => unreachable!("smga has its own driver"),
        };

        if alternate {
            coding = coding.other();
            convert_population(&mut pop, &driver.layout, coding)?;
            pop.coding = coding;
            driver.event(TraceKind::Alternation, coding, String::new());
            leg_len = 0;
            if cfg.variant == StrategyVariant::Aperiodic {
                leg_target = driver.sched_rng.gen_range(cfg.min_p..=cfg.max_p);
            }
            if cfg.variant == StrategyVariant::SteadyGen {
                state.reset_stagnation();
            }
        }
    }

    Ok(driver.finish(seed, cfg.label()))
}

fn run_smga(
    problem: &Problem,
    params: &GaParams,
    cfg: &StrategyConfig,
    seed: u64,
) -> Result<RunRecord> {
    if params.pop_size % 2 != 0 {
        return Err(Error::config("smga requires an even pop_size"));
    }
    let mut driver = Driver::new(problem, params, seed)?;
    let (coding1, coding2) = (cfg.coding1, cfg.coding2);

    // Phase 1: initial parallel stage over startGen ticks.
    let (pop, _) = driver.init_population(coding1)?;
    let (mut pop1, mut pop2) = split(&pop, &mut driver.sched_rng)?;
    convert_population(&mut pop2, &driver.layout, coding2)?;
    driver.event(TraceKind::Split, coding1, "initial split".to_string());
    let mut state1 = RunState::new(best_fitness(&pop1)?, driver.evaluations);
    let mut state2 = RunState::new(best_fitness(&pop2)?, driver.evaluations);

    while driver.generation < params.max_gen
        && driver.generation < cfg.start_gen
    {
        driver.tick_halves(&mut pop1, &mut state1, &mut pop2, &mut state2)?;
    }
    if driver.generation >= params.max_gen {
        return Ok(driver.finish(seed, cfg.label()));
    }

    let est1 = compute_steady_state(coding1, &state1.improvement_log, cfg.start_gen);
    let est2 = compute_steady_state(coding2, &state2.improvement_log, cfg.start_gen);
    let estimate_of = |c: Coding| {
        if c == coding1 {
            est1.estimate
        } else {
            est2.estimate
        }
    };

    let mut best_coding = select_best_coding(&pop1, coding1, &pop2, coding2)?;
    driver.event(
        TraceKind::CodingSelected,
        best_coding,
        format!("steady estimates {}:{} {}:{}", coding1, est1.estimate, coding2, est2.estimate),
    );
    convert_population(&mut pop1, &driver.layout, best_coding)?;
    convert_population(&mut pop2, &driver.layout, best_coding)?;
    let mut merged = merge(pop1, pop2)?;
    driver.event(TraceKind::Merge, best_coding, String::new());
    let mut merged_state = RunState::new(best_fitness(&merged)?, driver.evaluations);

    loop {
        // Merged stage: run until the selected coding's steady state.
        while driver.generation < params.max_gen
            && merged_state.stagnation_counter < estimate_of(best_coding)
        {
            driver.tick_single(&mut merged, &mut merged_state)?;
        }
        if driver.generation >= params.max_gen {
            break;
        }
        driver.event(
            TraceKind::SteadyDetected,
            best_coding,
            format!("merged stagnation {}", merged_state.stagnation_counter),
        );

        // Phase 2 split stage.
        let (p1, p2) = split(&merged, &mut driver.sched_rng)?;
        pop1 = p1;
        pop2 = p2;
        convert_population(&mut pop1, &driver.layout, coding1)?;
        convert_population(&mut pop2, &driver.layout, coding2)?;
        driver.event(TraceKind::Split, best_coding, String::new());
        state1 = RunState::new(best_fitness(&pop1)?, driver.evaluations);
        state2 = RunState::new(best_fitness(&pop2)?, driver.evaluations);

        while driver.generation < params.max_gen
            && state1.stagnation_counter < est1.estimate
            && state2.stagnation_counter < est2.estimate
        {
            driver.tick_halves(&mut pop1, &mut state1, &mut pop2, &mut state2)?;
        }
        if driver.generation >= params.max_gen {
            break;
        }
        let which = if state1.stagnation_counter >= est1.estimate {
            coding1
        } else {
            coding2
        };
        driver.event(
            TraceKind::SteadyDetected,
            which,
            format!(
                "half stagnation {}:{} {}:{}",
                coding1, state1.stagnation_counter, coding2, state2.stagnation_counter
            ),
        );

        best_coding = select_best_coding(&pop1, coding1, &pop2, coding2)?;
        driver.event(TraceKind::CodingSelected, best_coding, String::new());
        convert_population(&mut pop1, &driver.layout, best_coding)?;
        convert_population(&mut pop2, &driver.layout, best_coding)?;
        merged = merge(pop1, pop2)?;
        driver.event(TraceKind::Merge, best_coding, String::new());
        merged_state = RunState::new(best_fitness(&merged)?, driver.evaluations);
    }

    Ok(driver.finish(seed, cfg.label()))
}

/// Run one strategy to `max_gen` generations.
pub fn run(
    problem: &Problem,
    params: &GaParams,
    cfg: &StrategyConfig,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    match cfg.variant {
        StrategyVariant::Smga => run_smga(problem, params, cfg, seed),
        _ => run_serial(problem, params, cfg, seed),
    }
}
