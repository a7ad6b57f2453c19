//! Simple GA core: tournament selection, 1-point crossover, bit-flip
//! mutation, generational replacement with optional 1-elitism.
//!
//! One run is single-threaded and deterministic given its seed. All
//! randomness for the genetic operators flows through the RNG handed to
//! [`step_generation`].

use rand::seq::index;
use rand::Rng;

use crate::encoding::{convert_genotype, decode_genotype, BitString, Coding, GenotypeLayout};
use crate::error::{Error, Result};
use crate::objectives::Problem;

/// Genotype plus cached fitness, valid under the owning population's coding.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genotype: BitString,
    pub fitness: f64,
}

/// A set of individuals sharing one coding.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
    pub coding: Coding,
}

impl Population {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Engine parameters. Table defaults per problem come from
/// [`GaParams::standard`].
#[derive(Debug, Clone)]
pub struct GaParams {
    pub pop_size: usize,
    pub vec_size: usize,
    pub t_size: usize,
    pub p_cross: f64,
    pub one_point_rate: f64,
    pub p_mut: f64,
    pub p_mut_per_bit: f64,
    pub max_gen: u32,
    pub elitism: bool,
}

impl GaParams {
    /// Standard parameter set for a benchmark problem.
    pub fn standard(problem: &Problem) -> GaParams {
        use crate::objectives::ProblemId::*;
        let (t_size, p_cross, p_mut_per_bit) = match problem.id {
            F2 => (2, 0.6, 0.025),
            F6 => (2, 0.6, 0.0125),
            F7 => (4, 1.0, 0.0077),
            F8 => (2, 0.75, 0.0035),
            F9 => (2, 0.6, 0.006),
        };
        GaParams {
            pop_size: 100,
            vec_size: problem.vec_size(),
            t_size,
            p_cross,
            one_point_rate: 1.0,
            p_mut: 1.0,
            p_mut_per_bit,
            max_gen: 3500,
            elitism: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size == 0 {
            return Err(Error::config("pop_size must be >= 1"));
        }
        if self.t_size == 0 || self.t_size > self.pop_size {
            return Err(Error::config(format!(
                "t_size must be in [1, pop_size], got {}",
                self.t_size
            )));
        }
        for (name, p) in [
            ("p_cross", self.p_cross),
            ("one_point_rate", self.one_point_rate),
            ("p_mut", self.p_mut),
            ("p_mut_per_bit", self.p_mut_per_bit),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Per-run bookkeeping: generation counter, best-fitness history,
/// stagnation tracking and evaluation accounting.
#[derive(Debug, Clone)]
pub struct RunState {
    pub generation: u32,
    pub best_fitness_history: Vec<f64>,
    pub stagnation_counter: u32,
    pub improvement_log: Vec<u32>,
    pub evaluations: u64,
}

impl RunState {
    /// State observed at generation 0 with the given initial best fitness.
    pub fn new(initial_best: f64, initial_evaluations: u64) -> RunState {
        RunState {
            generation: 0,
            best_fitness_history: vec![initial_best],
            stagnation_counter: 0,
            improvement_log: Vec::new(),
            evaluations: initial_evaluations,
        }
    }

    pub fn best_so_far(&self) -> f64 {
        *self.best_fitness_history.last().expect("nonempty history")
    }

    /// Record the population best after one generation; strict improvement
    /// of the best-so-far resets the stagnation counter.
    pub fn observe_generation(&mut self, pop_best: f64) {
        self.generation += 1;
        let prev = self.best_so_far();
        if pop_best < prev {
            self.stagnation_counter = 0;
            self.improvement_log.push(self.generation);
            self.best_fitness_history.push(pop_best);
        } else {
            self.stagnation_counter += 1;
            self.best_fitness_history.push(prev);
        }
    }

    pub fn reset_stagnation(&mut self) {
        self.stagnation_counter = 0;
    }
}

fn evaluate_individual(
    genotype: BitString,
    problem: &Problem,
    layout: &GenotypeLayout,
    coding: Coding,
) -> Result<Individual> {
    let x = decode_genotype(&genotype, layout, coding)?;
    let fitness = problem.evaluate(&x)?;
    Ok(Individual { genotype, fitness })
}

/// Uniform random population of `pop_size` evaluated individuals.
pub fn generate_initial_population(
    problem: &Problem,
    params: &GaParams,
    coding: Coding,
    rng: &mut impl Rng,
) -> Result<Population> {
    params.validate()?;
    let layout = problem.layout();
    let members = (0..params.pop_size)
        .map(|_| {
            let g = BitString::random(params.vec_size, rng);
            evaluate_individual(g, problem, &layout, coding)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Population { members, coding })
}

/// Tournament of `t_size` distinct uniform picks; strict minimum fitness
/// wins, ties broken by lowest population index.
fn tournament(pop: &Population, t_size: usize, rng: &mut impl Rng) -> usize {
    let picks = index::sample(rng, pop.size(), t_size);
    let mut best = usize::MAX;
    for i in picks {
        if best == usize::MAX
            || pop.members[i].fitness < pop.members[best].fitness
            || (pop.members[i].fitness == pop.members[best].fitness && i < best)
        {
            best = i;
        }
    }
    best
}

fn one_point_crossover(a: &mut BitString, b: &mut BitString, rng: &mut impl Rng) {
    let len = a.len();
    if len < 2 {
        return;
    }
    let cut = rng.gen_range(1..len);
    for i in cut..len {
        let (ba, bb) = (a.get(i), b.get(i));
        if ba != bb {
            a.as_mut_slice()[i] = bb;
            b.as_mut_slice()[i] = ba;
        }
    }
}

fn bit_flip_mutation(g: &mut BitString, p_mut_per_bit: f64, rng: &mut impl Rng) {
    for i in 0..g.len() {
        if rng.gen::<f64>() < p_mut_per_bit {
            g.flip(i);
        }
    }
}

/// One full generational cycle. Returns the number of fitness evaluations
/// performed (the new population size).
pub fn step_generation(
    pop: &mut Population,
    problem: &Problem,
    params: &GaParams,
    rng: &mut impl Rng,
) -> Result<u64> {
    let layout = problem.layout();
    let size = pop.size();
    let elite = if params.elitism {
        Some(best_element(pop)?.clone())
    } else {
        None
    };

    let mut offspring: Vec<Individual> = Vec::with_capacity(size);
    while offspring.len() + 1 < size {
        let p1 = tournament(pop, params.t_size, rng);
        let p2 = tournament(pop, params.t_size, rng);
        let mut c1 = pop.members[p1].genotype.clone();
        let mut c2 = pop.members[p2].genotype.clone();
        if rng.gen::<f64>() < params.p_cross && rng.gen::<f64>() < params.one_point_rate {
            one_point_crossover(&mut c1, &mut c2, rng);
        }
        for child in [&mut c1, &mut c2] {
            if rng.gen::<f64>() < params.p_mut {
                bit_flip_mutation(child, params.p_mut_per_bit, rng);
            }
        }
        offspring.push(evaluate_individual(c1, problem, &layout, pop.coding)?);
        offspring.push(evaluate_individual(c2, problem, &layout, pop.coding)?);
    }
    // Odd population size: clone one more parent through.
    if offspring.len() < size {
        let p = tournament(pop, params.t_size, rng);
        let mut c = pop.members[p].genotype.clone();
        if rng.gen::<f64>() < params.p_mut {
            bit_flip_mutation(&mut c, params.p_mut_per_bit, rng);
        }
        offspring.push(evaluate_individual(c, problem, &layout, pop.coding)?);
    }

    if let Some(elite) = elite {
        let best_off = offspring
            .iter()
            .map(|m| m.fitness)
            .fold(f64::INFINITY, f64::min);
        if best_off > elite.fitness {
            let worst = worst_index(&offspring);
            offspring[worst] = elite;
        }
    }

    pop.members = offspring;
    Ok(size as u64)
}

fn worst_index(members: &[Individual]) -> usize {
    let mut worst = 0;
    for (i, m) in members.iter().enumerate() {
        if m.fitness > members[worst].fitness {
            worst = i;
        }
    }
    worst
}

/// Member with minimum fitness; ties broken by lowest index.
pub fn best_element(pop: &Population) -> Result<&Individual> {
    if pop.members.is_empty() {
        return Err(Error::contract("best_element on empty population"));
    }
    let mut best = 0;
    for (i, m) in pop.members.iter().enumerate() {
        if m.fitness < pop.members[best].fitness {
            best = i;
        }
    }
    Ok(&pop.members[best])
}

pub fn best_fitness(pop: &Population) -> Result<f64> {
    Ok(best_element(pop)?.fitness)
}

/// Mean and population standard deviation (n divisor) of fitnesses.
pub fn fitness_stats(pop: &Population) -> Result<(f64, f64)> {
    if pop.members.is_empty() {
        return Err(Error::contract("fitness_stats on empty population"));
    }
    let n = pop.size() as f64;
    let mean = pop.members.iter().map(|m| m.fitness).sum::<f64>() / n;
    let var = pop
        .members
        .iter()
        .map(|m| (m.fitness - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok((mean, var.sqrt()))
}

/// Convert every genotype to `to`. Fitness values are unchanged; the
/// conversion preserves phenotypes so no re-evaluation happens.
pub fn convert_population(
    pop: &mut Population,
    layout: &GenotypeLayout,
    to: Coding,
) -> Result<()> {
    if pop.coding == to {
        return Ok(());
    }
    let from = pop.coding;
    for m in &mut pop.members {
        m.genotype = convert_genotype(&m.genotype, layout, from, to)?;
    }
    pop.coding = to;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ProblemId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_params(problem: &Problem) -> GaParams {
        let mut p = GaParams::standard(problem);
        p.pop_size = 20;
        p
    }

    #[test]
    fn initial_population_shape_and_determinism() {
        let problem = Problem::standard(ProblemId::F2);
        let params = GaParams::standard(&problem);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pop = generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng)
            .unwrap();
        assert_eq!(pop.size(), 100);
        assert!(pop.members.iter().all(|m| m.genotype.len() == 40));

        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let pop2 =
            generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng2)
                .unwrap();
        for (a, b) in pop.members.iter().zip(&pop2.members) {
            assert_eq!(a.genotype, b.genotype);
            assert_eq!(a.fitness, b.fitness);
        }
    }

    #[test]
    fn initial_population_bit_balance() {
        let problem = Problem::standard(ProblemId::F7);
        let mut params = GaParams::standard(&problem);
        params.pop_size = 100;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pop = generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng)
            .unwrap();
        let total_bits = 100 * 200;
        let ones: usize = pop
            .members
            .iter()
            .map(|m| m.genotype.as_slice().iter().filter(|&&b| b).count())
            .sum();
        let mean = ones as f64 / total_bits as f64;
        assert!((0.45..=0.55).contains(&mean), "mean bit value {mean}");
    }

    #[test]
    fn no_variation_means_copies() {
        let problem = Problem::standard(ProblemId::F6);
        let mut params = small_params(&problem);
        params.p_cross = 0.0;
        params.p_mut_per_bit = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop =
            generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng)
                .unwrap();
        let before: std::collections::HashSet<_> =
            pop.members.iter().map(|m| m.genotype.clone()).collect();
        let best_before = best_fitness(&pop).unwrap();
        step_generation(&mut pop, &problem, &params, &mut rng).unwrap();
        assert!(pop
            .members
            .iter()
            .all(|m| before.contains(&m.genotype)));
        assert_eq!(best_fitness(&pop).unwrap(), best_before);
    }

    #[test]
    fn elitism_monotone_over_many_steps() {
        let problem = Problem::standard(ProblemId::F6);
        let params = small_params(&problem);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut pop =
            generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng)
                .unwrap();
        let mut best = best_fitness(&pop).unwrap();
        for _ in 0..1000 {
            step_generation(&mut pop, &problem, &params, &mut rng).unwrap();
            let b = best_fitness(&pop).unwrap();
            assert!(b <= best);
            assert_eq!(pop.size(), params.pop_size);
            best = b;
        }
    }

    #[test]
    fn full_size_tournament_returns_population_best() {
        let problem = Problem::standard(ProblemId::F2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let members: Vec<Individual> = (0..10)
            .map(|i| Individual {
                genotype: BitString::random(40, &mut rng),
                fitness: [5.0, 3.0, 8.0, 1.0, 9.0, 2.0, 7.0, 4.0, 6.0, 0.5][i],
            })
            .collect();
        let pop = Population {
            members,
            coding: Coding::StandardBinary,
        };
        let _ = problem;
        for _ in 0..50 {
            assert_eq!(tournament(&pop, 10, &mut rng), 9);
        }
    }

    #[test]
    fn tournament_tie_breaks_low_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let members: Vec<Individual> = [1.0, 1.0, 2.0]
            .iter()
            .map(|&f| Individual {
                genotype: BitString::zeros(4),
                fitness: f,
            })
            .collect();
        let pop = Population {
            members,
            coding: Coding::StandardBinary,
        };
        for _ in 0..20 {
            assert_eq!(tournament(&pop, 3, &mut rng), 0);
        }
    }

    #[test]
    fn best_element_rules() {
        let mk = |fs: &[f64]| Population {
            members: fs
                .iter()
                .map(|&f| Individual {
                    genotype: BitString::zeros(4),
                    fitness: f,
                })
                .collect(),
            coding: Coding::StandardBinary,
        };
        let p = mk(&[3.0, 1.0, 2.0]);
        assert_eq!(best_element(&p).unwrap().fitness, 1.0);
        let p = mk(&[1.0, 1.0, 2.0]);
        assert!(std::ptr::eq(best_element(&p).unwrap(), &p.members[0]));
        let p = mk(&[7.0]);
        assert_eq!(best_element(&p).unwrap().fitness, 7.0);
        let empty = Population {
            members: vec![],
            coding: Coding::StandardBinary,
        };
        assert!(best_element(&empty).is_err());
    }

    #[test]
    fn fitness_stats_basics() {
        let mk = |fs: &[f64]| Population {
            members: fs
                .iter()
                .map(|&f| Individual {
                    genotype: BitString::zeros(4),
                    fitness: f,
                })
                .collect(),
            coding: Coding::StandardBinary,
        };
        let (m, s) = fitness_stats(&mk(&[4.0, 4.0, 4.0])).unwrap();
        assert_eq!((m, s), (4.0, 0.0));
        let (m, s) = fitness_stats(&mk(&[0.0, 2.0])).unwrap();
        assert_eq!((m, s), (1.0, 1.0));
    }

    #[test]
    fn fitness_stats_against_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fs: Vec<f64> = (0..100).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let pop = Population {
            members: fs
                .iter()
                .map(|&f| Individual {
                    genotype: BitString::zeros(4),
                    fitness: f,
                })
                .collect(),
            coding: Coding::StandardBinary,
        };
        let (m, s) = fitness_stats(&pop).unwrap();
        // independent two-pass computation
        let om = fs.iter().sum::<f64>() / fs.len() as f64;
        let ov = fs.iter().map(|f| (f - om) * (f - om)).sum::<f64>() / fs.len() as f64;
        assert!((m - om).abs() <= 1e-12 * om.abs().max(1.0));
        assert!((s - ov.sqrt()).abs() <= 1e-12 * ov.sqrt().max(1.0));
    }

    #[test]
    fn convert_population_preserves_fitness_and_round_trips() {
        let problem = Problem::standard(ProblemId::F6);
        let params = small_params(&problem);
        let layout = problem.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut pop =
            generate_initial_population(&problem, &params, Coding::StandardBinary, &mut rng)
                .unwrap();
        let orig = pop.clone();

        convert_population(&mut pop, &layout, Coding::StandardBinary).unwrap();
        for (a, b) in pop.members.iter().zip(&orig.members) {
            assert_eq!(a.genotype, b.genotype);
        }

        convert_population(&mut pop, &layout, Coding::Gray).unwrap();
        assert_eq!(pop.coding, Coding::Gray);
        let mut f1: Vec<f64> = pop.members.iter().map(|m| m.fitness).collect();
        let mut f2: Vec<f64> = orig.members.iter().map(|m| m.fitness).collect();
        f1.sort_by(f64::total_cmp);
        f2.sort_by(f64::total_cmp);
        assert_eq!(f1, f2);

        convert_population(&mut pop, &layout, Coding::StandardBinary).unwrap();
        for (a, b) in pop.members.iter().zip(&orig.members) {
            assert_eq!(a.genotype, b.genotype);
        }
    }

    #[test]
    fn run_state_stagnation_tracking() {
        let mut st = RunState::new(10.0, 100);
        st.observe_generation(9.0);
        assert_eq!(st.stagnation_counter, 0);
        assert_eq!(st.improvement_log, vec![1]);
        st.observe_generation(9.0);
        st.observe_generation(9.5);
        assert_eq!(st.stagnation_counter, 2);
        assert_eq!(st.best_so_far(), 9.0);
        st.observe_generation(8.0);
        assert_eq!(st.stagnation_counter, 0);
        assert_eq!(st.improvement_log, vec![1, 4]);
    }
}
