//! Weight protection: a gradient-free analogue of elastic weight
//! consolidation.
//!
//! After a task is learned, the best individual (by revised fitness) is
//! frozen as a reference. While later tasks are learned, fitness is
//! reduced by
//!
//! ```text
//! λ1 · Σ_{i ∈ ref}  (θ_i − θ*_i)²   +   λ2 · Σ_{j ∉ ref, j active} θ_j²
//! ```
//!
//! so existing connections are anchored to their old values and new
//! connections pay an L2 cost. A connection that the reference had but the
//! genome dropped counts as θ_i = 0. There is no factor ½.

use thiserror::Error;

use crate::environments::TaskId;
use crate::evolution::Individual;
use crate::genome::Genome;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WpError {
    #[error("genome has {genome} parameters but the reference has {reference}")]
    LayoutMismatch { genome: usize, reference: usize },
    #[error("cannot select a reference from an empty population")]
    EmptyPopulation,
    #[error("invalid weight-protection config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpConfig {
    /// Weight on changes to connections present in the reference.
    pub lambda1: f64,
    /// Weight on the magnitude of connections absent from the reference.
    pub lambda2: f64,
    /// Probability of the connection-count objective, applied as a period
    /// of `round(1/p)` generations.
    pub p: f64,
}

impl Default for WpConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.035,
            lambda2: 0.02,
            p: 0.2,
        }
    }
}

impl WpConfig {
    pub fn validate(&self) -> Result<(), WpError> {
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite())
            || !(self.lambda2 >= 0.0 && self.lambda2.is_finite())
        {
            return Err(WpError::InvalidConfig(format!(
                "lambdas must be finite and non-negative, got {} and {}",
                self.lambda1, self.lambda2
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(WpError::InvalidConfig(format!(
                "p = {} is outside [0, 1]",
                self.p
            )));
        }
        Ok(())
    }

    /// Generations between applications of the size objective; `None`
    /// when the objective is never used.
    pub fn modularity_period(&self) -> Option<usize> {
        if self.p <= 0.0 {
            None
        } else {
            Some(((1.0 / self.p).round() as usize).max(1))
        }
    }
}

/// Frozen parameters of the individual chosen at the last task boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub weights: Vec<f64>,
    pub mask: Vec<bool>,
    pub tasks_learned: Vec<TaskId>,
}

impl ReferenceModel {
    pub fn from_genome(genome: &Genome, tasks_learned: Vec<TaskId>) -> Self {
        Self {
            weights: genome.weights().to_vec(),
            mask: genome.mask().to_vec(),
            tasks_learned,
        }
    }
}

pub fn wp_penalty(
    genome: &Genome,
    reference: &ReferenceModel,
    wp: &WpConfig,
) -> Result<f64, WpError> {
    if genome.len() != reference.weights.len() || reference.mask.len() != reference.weights.len() {
        return Err(WpError::LayoutMismatch {
            genome: genome.len(),
            reference: reference.weights.len(),
        });
    }
    let mut existing = 0.0;
    let mut added = 0.0;
    for i in 0..genome.len() {
        let theta = if genome.is_active(i) {
            genome.weights()[i]
        } else {
            0.0
        };
        if reference.mask[i] {
            existing += (theta - reference.weights[i]).powi(2);
        } else if genome.is_active(i) {
            added += theta * theta;
        }
    }
    Ok(wp.lambda1 * existing + wp.lambda2 * added)
}

pub fn revised_fitness(task_fitness: f64, penalty: f64) -> f64 {
    task_fitness - penalty
}

/// Task fitness and revised fitness of a genome against an optional
/// reference. With no reference (first task) they coincide.
pub fn protected_fitness(
    genome: &Genome,
    task_fitness: f64,
    reference: Option<&ReferenceModel>,
    wp: &WpConfig,
) -> Result<(f64, f64), WpError> {
    match reference {
        None => Ok((task_fitness, task_fitness)),
        Some(r) => Ok((
            task_fitness,
            revised_fitness(task_fitness, wp_penalty(genome, r, wp)?),
        )),
    }
}

/// Freezes the individual with the highest revised fitness (lowest index
/// on ties) and records `task` as learned.
pub fn select_reference(
    population: &[Individual],
    task: TaskId,
    previous: Option<&ReferenceModel>,
) -> Result<ReferenceModel, WpError> {
    let best = best_by(population, |i| i.revised_fitness).ok_or(WpError::EmptyPopulation)?;
    let mut tasks = previous
        .map(|r| r.tasks_learned.clone())
        .unwrap_or_default();
    tasks.push(task);
    Ok(ReferenceModel::from_genome(&population[best].genome, tasks))
}

/// Index of the maximum of `key`, first occurrence on ties.
pub(crate) fn best_by<F: Fn(&Individual) -> f64>(
    population: &[Individual],
    key: F,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, ind) in population.iter().enumerate() {
        let k = key(ind);
        if best.map_or(true, |(_, b)| k > b) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

/// Whether the connection-count objective applies at `generation`.
pub fn size_objective_active(generation: usize, wp: &WpConfig) -> bool {
    wp.modularity_period()
        .is_some_and(|period| generation % period == 0)
}

/// `(revised, −connections)` on size-objective generations, otherwise
/// `(revised)`.
pub fn objectives_for_generation(
    generation: usize,
    wp: &WpConfig,
    revised: f64,
    connections: usize,
) -> Vec<f64> {
    if size_objective_active(generation, wp) {
        vec![revised, -(connections as f64)]
    } else {
        vec![revised]
    }
}
