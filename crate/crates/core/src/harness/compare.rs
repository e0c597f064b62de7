use serde::{Deserialize, Serialize};

use super::run::{mean, run_continual};
use super::{HarnessError, RunConfig, RunResult, Technique};
use crate::environments::TaskId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task_id: TaskId,
    pub mean: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechniqueSummary {
    pub technique: Technique,
    pub repeats: usize,
    pub per_task: Vec<TaskScore>,
    /// Mean over repeats of the selected individual's mean task fitness.
    pub mean_overall: f64,
    pub best_overall: f64,
    /// Mean task-1 fitness at each task boundary.
    pub mean_retention: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub summaries: Vec<TechniqueSummary>,
    /// `runs[repeat]` holds one result per technique, in `Technique::ALL`
    /// order.
    pub runs: Vec<Vec<RunResult>>,
}

impl Comparison {
    pub fn summary(&self, technique: Technique) -> &TechniqueSummary {
        self.summaries
            .iter()
            .find(|s| s.technique == technique)
            .expect("every technique is summarized")
    }

    /// Per-repeat values of `f` for one technique.
    pub fn per_repeat<F: Fn(&RunResult) -> f64>(&self, technique: Technique, f: F) -> Vec<f64> {
        self.runs
            .iter()
            .flat_map(|rs| rs.iter().filter(|r| r.technique == technique).map(&f))
            .collect()
    }
}

/// Runs every technique on the template's task sequence for each repeat.
/// Repeat `r` uses seed `template seed + r` for all four techniques.
pub fn technique_comparison(
    template: &RunConfig,
    repeats: usize,
) -> Result<Comparison, HarnessError> {
    if repeats == 0 {
        return Err(HarnessError::Config {
            key: "repeats".into(),
            message: "must be at least 1".into(),
        });
    }
    let mut runs = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut per_technique = Vec::with_capacity(Technique::ALL.len());
        for technique in Technique::ALL {
            let mut config = template.clone();
            config.technique = technique;
            config.threshold = None;
            config.evolution.master_seed = template.seed().wrapping_add(r as u64);
            per_technique.push(run_continual(&config)?);
        }
        runs.push(per_technique);
    }
    let mut comparison = Comparison {
        summaries: Vec::new(),
        runs,
    };
    comparison.summaries = Technique::ALL
        .iter()
        .map(|&t| summarize(&comparison, t, &template.task_sequence))
        .collect();
    Ok(comparison)
}

fn summarize(c: &Comparison, technique: Technique, tasks: &[TaskId]) -> TechniqueSummary {
    let max = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let per_task = tasks
        .iter()
        .enumerate()
        .map(|(i, &task_id)| {
            let xs = c.per_repeat(technique, |r| r.final_fitness[i]);
            TaskScore {
                task_id,
                mean: mean(&xs),
                best: max(&xs),
            }
        })
        .collect();
    let overall = c.per_repeat(technique, RunResult::overall_fitness);
    let mean_retention = (0..tasks.len())
        .map(|b| mean(&c.per_repeat(technique, |r| r.retention[b].task1_fitness)))
        .collect();
    TechniqueSummary {
        technique,
        repeats: c.runs.len(),
        per_task,
        mean_overall: mean(&overall),
        best_overall: max(&overall),
        mean_retention,
    }
}
