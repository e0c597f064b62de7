use serde::{Deserialize, Serialize};

use super::run::{continual, mean};
use super::stats::spearman;
use super::{HarnessError, RunConfig, Technique};
use crate::environments::evaluate;
use crate::weight_protection::{wp_penalty, WpConfig};

/// `(λ₁, λ₂)` pairs: no protection, λ₁ only, λ₂ only, both too large,
/// and the defaults.
pub const DEFAULT_GRID: [(f64, f64); 5] = [
    (0.0, 0.0),
    (0.035, 0.0),
    (0.0, 0.02),
    (0.2, 0.1),
    (0.035, 0.02),
];

/// One final-population individual of one repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `repeat * population_size + position in the final population`.
    pub individual_index: usize,
    pub penalty: f64,
    pub task1_fitness: f64,
    pub task2_fitness: f64,
}

/// Aggregate over all repeats of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda1: f64,
    pub lambda2: f64,
    pub repeats: usize,
    /// Mean over repeats of the selected individual's task fitnesses.
    pub mean_task1: f64,
    pub mean_task2: f64,
    /// Rank correlation of penalty and task-1 fitness over the pooled
    /// final populations.
    pub spearman: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, lambda1: f64, lambda2: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.lambda1 == lambda1 && c.lambda2 == lambda2)
    }
}

/// Runs the template's two-task sequence with weight protection for each
/// `(λ₁, λ₂)` in `grid`, repeat `r` using seed `template seed + r`.
/// Penalties are measured with the configuration's own λ values, or the
/// template's when both are zero.
pub fn lambda_sweep(
    template: &RunConfig,
    grid: &[(f64, f64)],
    repeats: usize,
) -> Result<SweepTable, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config {
            key: "sweep.grid".into(),
            message: "grid is empty".into(),
        });
    }
    if template.task_sequence.len() != 2 {
        return Err(HarnessError::Config {
            key: "tasks".into(),
            message: format!(
                "the sweep needs exactly two tasks, found {}",
                template.task_sequence.len()
            ),
        });
    }
    let topology = template.evolution.topology;
    let mut table = SweepTable::default();
    for &(lambda1, lambda2) in grid {
        let mut config = template.clone();
        config.technique = Technique::from_flags(true, template.technique.uses_modularity());
        config.threshold = None;
        config.wp = WpConfig {
            lambda1,
            lambda2,
            ..template.wp
        };
        let measure = if lambda1 == 0.0 && lambda2 == 0.0 {
            template.wp
        } else {
            config.wp
        };
        let first = config.tasks.get(config.task_sequence[0])?.clone();

        let mut penalties = Vec::new();
        let mut task1 = Vec::new();
        let (mut best1, mut best2) = (Vec::new(), Vec::new());
        for r in 0..repeats {
            config.evolution.master_seed = template.seed().wrapping_add(r as u64);
            let spec1 = first.with_seed_base(config.seed());
            let out = continual(&config)?;
            let reference = &out.references[0];
            let size = out.population.len();
            for (i, ind) in out.population.iter().enumerate() {
                let penalty = wp_penalty(&ind.genome, reference, &measure)?;
                let fit1 = evaluate(&ind.genome, &spec1, topology);
                penalties.push(penalty);
                task1.push(fit1);
                table.rows.push(SweepRow {
                    lambda1,
                    lambda2,
                    individual_index: r * size + i,
                    penalty,
                    task1_fitness: fit1,
                    task2_fitness: ind.task_fitness,
                });
            }
            best1.push(out.result.final_fitness[0]);
            best2.push(out.result.final_fitness[1]);
        }
        table.cells.push(SweepCell {
            lambda1,
            lambda2,
            repeats,
            mean_task1: mean(&best1),
            mean_task2: mean(&best2),
            spearman: spearman(&penalties, &task1),
        });
    }
    Ok(table)
}
