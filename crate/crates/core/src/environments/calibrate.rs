use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{evaluate_raw, TaskSpec};
use crate::evolution::{
    evolve_generation, initial_genomes, score_all, EvolutionConfig, EvolutionError, Scored,
};

/// How much single-task evolution to spend finding a task's raw range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalibrationBudget {
    pub runs: usize,
    pub generations: usize,
}

impl Default for CalibrationBudget {
    fn default() -> Self {
        Self {
            runs: 3,
            generations: 40,
        }
    }
}

/// Runs `budget.runs` single-task evolutions directly on raw return and
/// reports the worst and best mean raw return of any evaluated
/// individual. `spec.raw_min/raw_max` are ignored except as the failure
/// score for diverging networks.
pub fn calibrate_bounds(
    spec: &TaskSpec,
    budget: CalibrationBudget,
    config: &EvolutionConfig,
) -> Result<(f64, f64), EvolutionError> {
    config.validate()?;
    let topology = config.topology;
    let objective = |g: &crate::genome::Genome| {
        let raw = evaluate_raw(g, spec, topology);
        Scored {
            task_fitness: raw,
            revised_fitness: raw,
            objectives: vec![raw],
        }
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut observe = |pop: &[crate::evolution::Individual]| {
        for ind in pop {
            lo = lo.min(ind.task_fitness);
            hi = hi.max(ind.task_fitness);
        }
    };
    for run in 0..budget.runs.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed.wrapping_add(run as u64));
        let mut pop = score_all(initial_genomes(config, &mut rng), &objective);
        observe(&pop);
        for _ in 0..budget.generations {
            pop = evolve_generation(pop, &objective, config, &mut rng)?;
            observe(&pop);
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    Ok((lo, hi))
}
