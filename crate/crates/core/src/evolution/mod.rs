//! (μ+λ) NSGA-II over fixed-layout genomes.

mod nsga2;
mod variation;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::genome::{Genome, Topology};

pub use nsga2::{
    assign_rank_and_crowding, crowding_distance, dominates, fast_non_dominated_sort, nsga2_select,
};
pub use variation::{
    binary_tournament, gaussian_mutate, single_point_crossover, single_point_crossover_at,
    toggle_connection,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("objective vectors have different arity ({left} vs {right})")]
    ArityMismatch { left: usize, right: usize },
    #[error("genome lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} candidates for selection, found {found}")]
    NotEnoughCandidates { needed: usize, found: usize },
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub per_gene_prob: f64,
    pub structural_prob: f64,
    pub gaussian_sigma: f64,
    pub init_fraction: f64,
    pub topology: Topology,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            crossover_prob: 0.6,
            mutation_prob: 0.4,
            per_gene_prob: 0.1,
            structural_prob: 0.1,
            gaussian_sigma: 1.0,
            init_fraction: 0.1,
            topology: Topology::standard(),
            master_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let probs = [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("per_gene_prob", self.per_gene_prob),
            ("structural_prob", self.structural_prob),
            ("init_fraction", self.init_fraction),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(EvolutionError::InvalidConfig(format!(
                    "{name} = {p} is outside [0, 1]"
                )));
            }
        }
        if self.population_size == 0 {
            return Err(EvolutionError::InvalidConfig(
                "population_size must be positive".into(),
            ));
        }
        if !(self.gaussian_sigma.is_finite() && self.gaussian_sigma >= 0.0) {
            return Err(EvolutionError::InvalidConfig(format!(
                "gaussian_sigma = {}",
                self.gaussian_sigma
            )));
        }
        Ok(())
    }
}

/// What an objective function reports for one genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub task_fitness: f64,
    pub revised_fitness: f64,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    /// Normalized fitness on the current task.
    pub task_fitness: f64,
    /// Task fitness minus any weight-protection penalty.
    pub revised_fitness: f64,
    /// Maximized by selection.
    pub objectives: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn new(
        genome: Genome,
        task_fitness: f64,
        revised_fitness: f64,
        objectives: Vec<f64>,
    ) -> Self {
        let finite = |x: f64| if x.is_finite() { x } else { 0.0 };
        Self {
            genome,
            task_fitness: finite(task_fitness),
            revised_fitness: finite(revised_fitness),
            objectives: objectives.into_iter().map(finite).collect(),
            rank: 0,
            crowding: 0.0,
        }
    }

    pub fn from_scored(genome: Genome, scored: Scored) -> Self {
        Self::new(
            genome,
            scored.task_fitness,
            scored.revised_fitness,
            scored.objectives,
        )
    }
}

/// Scores every genome, in parallel, preserving order.
pub fn score_all<F>(genomes: Vec<Genome>, objective_fn: &F) -> Vec<Individual>
where
    F: Fn(&Genome) -> Scored + Sync,
{
    genomes
        .into_par_iter()
        .map(|g| {
            let s = objective_fn(&g);
            Individual::from_scored(g, s)
        })
        .collect()
}

/// Random initial population drawn from `rng`.
pub fn initial_genomes<R: Rng + ?Sized>(config: &EvolutionConfig, rng: &mut R) -> Vec<Genome> {
    (0..config.population_size)
        .map(|_| Genome::random(config.topology, config.init_fraction, rng))
        .collect()
}

/// Produces one offspring per slot from its own RNG stream, so the
/// result does not depend on evaluation order.
fn make_offspring(
    pop: &[Individual],
    config: &EvolutionConfig,
    generation_seed: u64,
    slot: usize,
) -> Genome {
    let mut rng = ChaCha8Rng::seed_from_u64(generation_seed);
    rng.set_stream(slot as u64 + 1);
    let first = binary_tournament(pop, &mut rng);
    let mut child = pop[first].genome.clone();
    if rng.gen_bool(config.crossover_prob) {
        let second = binary_tournament(pop, &mut rng);
        if let Ok((c, _)) = single_point_crossover(&child, &pop[second].genome, &mut rng) {
            child = c;
        }
    }
    if rng.gen_bool(config.mutation_prob) {
        child = gaussian_mutate(&child, &mut rng, config);
    }
    child
}

/// One (μ+λ) generation. `pop` must already carry objectives for the
/// current objective scheme; offspring are scored with `objective_fn`.
pub fn evolve_generation<F, R>(
    mut pop: Vec<Individual>,
    objective_fn: &F,
    config: &EvolutionConfig,
    rng: &mut R,
) -> Result<Vec<Individual>, EvolutionError>
where
    F: Fn(&Genome) -> Scored + Sync,
    R: Rng + ?Sized,
{
    if pop.is_empty() {
        return Err(EvolutionError::NotEnoughCandidates {
            needed: 1,
            found: 0,
        });
    }
    assign_rank_and_crowding(&mut pop)?;
    let mu = pop.len();
    let generation_seed: u64 = rng.gen();
    let offspring: Vec<Genome> = (0..config.population_size)
        .into_par_iter()
        .map(|slot| make_offspring(&pop, config, generation_seed, slot))
        .collect();
    let mut candidates = pop;
    candidates.extend(score_all(offspring, objective_fn));
    nsga2_select(candidates, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_objective(g: &Genome) -> Scored {
        // fitness = -distance of the effective weights from all-ones
        let f = -g
            .effective_weights()
            .iter()
            .map(|w| (w - 1.0).powi(2))
            .sum::<f64>();
        Scored {
            task_fitness: f,
            revised_fitness: f,
            objectives: vec![f],
        }
    }

    fn start(config: &EvolutionConfig, rng: &mut ChaCha8Rng) -> Vec<Individual> {
        score_all(initial_genomes(config, rng), &sum_objective)
    }

    #[test]
    fn zero_rates_only_clone_parents() {
        let config = EvolutionConfig {
            population_size: 20,
            crossover_prob: 0.0,
            mutation_prob: 0.0,
            ..EvolutionConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = start(&config, &mut rng);
        let next = evolve_generation(pop.clone(), &sum_objective, &config, &mut rng).unwrap();
        let key = |p: &[Individual]| {
            let mut v: Vec<String> = p.iter().map(|i| i.genome.to_string()).collect();
            v.sort();
            v
        };
        // offspring are clones, so survivors are drawn from the parents
        let before = key(&pop);
        assert_eq!(next.len(), pop.len());
        assert!(key(&next).iter().all(|g| before.contains(g)));
        let best = |p: &[Individual]| {
            p.iter()
                .map(|i| i.task_fitness)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        assert_eq!(best(&next), best(&pop));
    }

    #[test]
    fn elitism_over_fifty_generations() {
        let config = EvolutionConfig {
            population_size: 30,
            ..EvolutionConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut pop = start(&config, &mut rng);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..50 {
            pop = evolve_generation(pop, &sum_objective, &config, &mut rng).unwrap();
            let now = pop
                .iter()
                .map(|i| i.revised_fitness)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(now >= best);
            best = now;
        }
        assert_eq!(pop.len(), 30);
        assert!(pop.iter().all(|i| i.genome.len() == 108));
    }

    #[test]
    fn same_seed_same_trace() {
        let config = EvolutionConfig {
            population_size: 16,
            ..EvolutionConfig::default()
        };
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(33);
            let mut pop = start(&config, &mut rng);
            for _ in 0..10 {
                pop = evolve_generation(pop, &sum_objective, &config, &mut rng).unwrap();
            }
            pop.iter().map(|i| i.genome.to_string()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::default().validate().is_ok());
        let bad = EvolutionConfig {
            mutation_prob: 1.5,
            ..EvolutionConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn non_finite_scores_are_zeroed() {
        let ind = Individual::new(
            Genome::empty(Topology::standard()),
            f64::NAN,
            f64::NAN,
            vec![f64::INFINITY],
        );
        assert_eq!(ind.task_fitness, 0.0);
        assert_eq!(ind.objectives, vec![0.0]);
    }
}
