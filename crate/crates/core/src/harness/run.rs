use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HarnessError, RunConfig, Technique};
use crate::environments::{evaluate, TaskId, TaskSpec};
use crate::evolution::{evolve_generation, initial_genomes, score_all, Individual, Scored};
use crate::genome::Genome;
use crate::weight_protection::{
    best_by, objectives_for_generation, protected_fitness, select_reference, ReferenceModel,
    WpConfig,
};

/// One row of `stats.csv`, taken after a generation's survivor selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub gen: usize,
    pub task_index: usize,
    pub task_id: TaskId,
    pub mean_task_fit: f64,
    pub max_task_fit: f64,
    pub mean_revised: f64,
    pub max_revised: f64,
    pub mean_connections: f64,
}

/// Fitness on the first task of the best individual at a task boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionRecord {
    pub after_task_index: usize,
    pub task_id: TaskId,
    pub task1_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    pub converged: bool,
    pub generations: usize,
    /// Times each task in the sequence was made the current task.
    pub visits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub technique: Technique,
    pub seed: u64,
    pub tasks: Vec<TaskId>,
    pub stats: Vec<GenerationStats>,
    pub retention: Vec<RetentionRecord>,
    /// Normalized fitness of the selected individual on each task of the
    /// sequence.
    pub final_fitness: Vec<f64>,
    pub best_genome: String,
    pub threshold: Option<ThresholdOutcome>,
}

impl RunResult {
    pub fn best_genome(&self) -> Result<Genome, HarnessError> {
        Ok(self.best_genome.parse()?)
    }

    pub fn overall_fitness(&self) -> f64 {
        mean(&self.final_fitness)
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Everything a run leaves behind, including state the result file does
/// not persist.
pub(crate) struct Outcome {
    pub result: RunResult,
    pub population: Vec<Individual>,
    /// Reference chosen at each boundary, for WP techniques.
    pub references: Vec<ReferenceModel>,
}

fn make_scorer<'s>(
    spec: &'s TaskSpec,
    config: &'s RunConfig,
    objective_wp: &'s WpConfig,
    reference: Option<&'s ReferenceModel>,
    generation: usize,
) -> impl Fn(&Genome) -> Scored + Sync + 's {
    let topology = config.evolution.topology;
    move |g: &Genome| {
        let fit = evaluate(g, spec, topology);
        let (task_fitness, revised_fitness) = protected_fitness(g, fit, reference, &config.wp)
            .expect("reference shares the genome layout");
        Scored {
            task_fitness,
            revised_fitness,
            objectives: objectives_for_generation(
                generation,
                objective_wp,
                revised_fitness,
                g.connection_count(),
            ),
        }
    }
}

struct Session<'a> {
    config: &'a RunConfig,
    specs: Vec<TaskSpec>,
    /// Weight-protection settings with the modularity rate the technique
    /// actually uses.
    objective_wp: WpConfig,
    rng: ChaCha8Rng,
    pop: Vec<Individual>,
    reference: Option<ReferenceModel>,
    references: Vec<ReferenceModel>,
    generation: usize,
    stats: Vec<GenerationStats>,
    retention: Vec<RetentionRecord>,
}

impl<'a> Session<'a> {
    fn new(config: &'a RunConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let seed = config.seed();
        let specs = config
            .task_sequence
            .iter()
            .map(|t| config.tasks.get(*t).map(|s| s.with_seed_base(seed)))
            .collect::<Result<Vec<_>, _>>()?;
        let objective_wp = WpConfig {
            p: if config.technique.uses_modularity() {
                config.wp.p
            } else {
                0.0
            },
            ..config.wp
        };
        // The initial population depends only on the seed, so every
        // technique starts a repeat from the same genomes.
        let mut init_rng = ChaCha8Rng::seed_from_u64(seed);
        let genomes = initial_genomes(&config.evolution, &mut init_rng);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let mut session = Session {
            config,
            specs,
            objective_wp,
            rng,
            pop: Vec::new(),
            reference: None,
            references: Vec::new(),
            generation: 0,
            stats: Vec::new(),
            retention: Vec::new(),
        };
        let pop = score_all(genomes, &session.scorer(0, 0));
        session.pop = pop;
        Ok(session)
    }

    fn scorer(
        &self,
        task_index: usize,
        generation: usize,
    ) -> impl Fn(&Genome) -> Scored + Sync + '_ {
        make_scorer(
            &self.specs[task_index],
            self.config,
            &self.objective_wp,
            self.reference.as_ref(),
            generation,
        )
    }

    /// Re-scores the whole population on a newly current task.
    fn enter_task(&mut self, task_index: usize) {
        let genomes: Vec<Genome> = std::mem::take(&mut self.pop)
            .into_iter()
            .map(|i| i.genome)
            .collect();
        let pop = score_all(genomes, &self.scorer(task_index, self.generation));
        self.pop = pop;
    }

    fn step(&mut self, task_index: usize) -> Result<(), HarnessError> {
        let gen = self.generation;
        for ind in &mut self.pop {
            ind.objectives = objectives_for_generation(
                gen,
                &self.objective_wp,
                ind.revised_fitness,
                ind.genome.connection_count(),
            );
        }
        let pop = std::mem::take(&mut self.pop);
        let scorer = make_scorer(
            &self.specs[task_index],
            self.config,
            &self.objective_wp,
            self.reference.as_ref(),
            gen,
        );
        let next = evolve_generation(pop, &scorer, &self.config.evolution, &mut self.rng)?;
        drop(scorer);
        self.pop = next;
        self.record(task_index);
        self.generation += 1;
        Ok(())
    }

    fn record(&mut self, task_index: usize) {
        let n = self.pop.len() as f64;
        let max =
            |f: fn(&Individual) -> f64| self.pop.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        self.stats.push(GenerationStats {
            gen: self.generation,
            task_index,
            task_id: self.config.task_sequence[task_index],
            mean_task_fit: self.pop.iter().map(|i| i.task_fitness).sum::<f64>() / n,
            max_task_fit: max(|i| i.task_fitness),
            mean_revised: self.pop.iter().map(|i| i.revised_fitness).sum::<f64>() / n,
            max_revised: max(|i| i.revised_fitness),
            mean_connections: self
                .pop
                .iter()
                .map(|i| i.genome.connection_count() as f64)
                .sum::<f64>()
                / n,
        });
    }

    fn mean_task_fitness(&self) -> f64 {
        self.pop.iter().map(|i| i.task_fitness).sum::<f64>() / self.pop.len() as f64
    }

    /// The technique's choice of best individual: highest revised fitness
    /// under weight protection, highest task fitness otherwise.
    fn best(&self) -> usize {
        let idx = if self.config.technique.uses_wp() {
            best_by(&self.pop, |i| i.revised_fitness)
        } else {
            best_by(&self.pop, |i| i.task_fitness)
        };
        idx.expect("population is never empty")
    }

    fn fitness_on(&self, genome: &Genome, task_index: usize) -> f64 {
        evaluate(
            genome,
            &self.specs[task_index],
            self.config.evolution.topology,
        )
    }

    fn boundary(&mut self, task_index: usize, boundary_index: usize) -> Result<(), HarnessError> {
        let best = self.best();
        self.retention.push(RetentionRecord {
            after_task_index: boundary_index,
            task_id: self.config.task_sequence[task_index],
            task1_fitness: self.fitness_on(&self.pop[best].genome, 0),
        });
        if self.config.technique.uses_wp() {
            let reference = select_reference(
                &self.pop,
                self.config.task_sequence[task_index],
                self.reference.as_ref(),
            )?;
            self.references.push(reference.clone());
            self.reference = Some(reference);
        }
        Ok(())
    }

    fn finish(self, threshold: Option<ThresholdOutcome>) -> Outcome {
        let best = self.best();
        let genome = &self.pop[best].genome;
        let final_fitness = (0..self.specs.len())
            .map(|t| self.fitness_on(genome, t))
            .collect();
        let result = RunResult {
            technique: self.config.technique,
            seed: self.config.seed(),
            tasks: self.config.task_sequence.clone(),
            stats: self.stats,
            retention: self.retention,
            final_fitness,
            best_genome: genome.to_string(),
            threshold,
        };
        Outcome {
            result,
            population: self.pop,
            references: self.references,
        }
    }
}

pub(crate) fn continual(config: &RunConfig) -> Result<Outcome, HarnessError> {
    let mut s = Session::new(config)?;
    for t in 0..config.task_sequence.len() {
        if t > 0 {
            s.enter_task(t);
        }
        for _ in 0..config.generations_per_task {
            s.step(t)?;
        }
        s.boundary(t, t)?;
    }
    Ok(s.finish(None))
}

/// Evolves on each task for `generations_per_task` generations in turn,
/// updating the reference at every boundary.
pub fn run_continual(config: &RunConfig) -> Result<RunResult, HarnessError> {
    Ok(continual(config)?.result)
}

/// Cycles through the tasks, moving on whenever the population's mean
/// fitness on the current task reaches the threshold. Stops once the
/// population holds the threshold on every task at once, which is only
/// checked after each task has been visited, or at the generation cap.
pub fn run_threshold_loop(config: &RunConfig) -> Result<RunResult, HarnessError> {
    let threshold = config.threshold.ok_or_else(|| HarnessError::Config {
        key: "threshold".into(),
        message: "threshold loop needs a threshold".into(),
    })?;
    let n = config.task_sequence.len();
    let mut s = Session::new(config)?;
    let mut visits = vec![0; n];
    let mut current = 0;
    visits[0] = 1;
    let mut boundaries = 0;
    let mut converged = false;
    while s.generation < config.generation_cap {
        s.step(current)?;
        if s.mean_task_fitness() < threshold {
            continue;
        }
        if visits.iter().all(|&v| v > 0) && holds_everywhere(&s, threshold) {
            converged = true;
            break;
        }
        s.boundary(current, boundaries)?;
        boundaries += 1;
        current = (current + 1) % n;
        visits[current] += 1;
        s.enter_task(current);
    }
    let outcome = ThresholdOutcome {
        converged,
        generations: s.generation,
        visits,
    };
    Ok(s.finish(Some(outcome)).result)
}

fn holds_everywhere(s: &Session, threshold: f64) -> bool {
    (0..s.specs.len()).all(|t| {
        let fits: Vec<f64> = s.pop.iter().map(|i| s.fitness_on(&i.genome, t)).collect();
        mean(&fits) >= threshold
    })
}

/// Threshold loop when the config sets a threshold, continual otherwise.
pub fn run(config: &RunConfig) -> Result<RunResult, HarnessError> {
    if config.threshold.is_some() {
        run_threshold_loop(config)
    } else {
        run_continual(config)
    }
}
