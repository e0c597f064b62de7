use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Comparison, HarnessError, RunConfig, RunResult, SweepTable};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_stats_csv(path: &Path, result: &RunResult) -> Result<(), HarnessError> {
    let header = [
        "gen",
        "task_index",
        "task_id",
        "mean_task_fit",
        "max_task_fit",
        "mean_revised",
        "max_revised",
        "mean_connections",
    ];
    write_rows(path, &result.stats, &header)
}

pub fn write_retention_csv(path: &Path, result: &RunResult) -> Result<(), HarnessError> {
    write_rows(
        path,
        &result.retention,
        &["after_task_index", "task_id", "task1_fitness"],
    )
}

/// Writes `stats.csv`, `retention.csv`, `final.csv`, `result.json`,
/// `best_genome.txt` and the effective `config.conf` into `dir`.
pub fn write_run(
    dir: &Path,
    result: &RunResult,
    config: Option<&RunConfig>,
) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_stats_csv(&dir.join("stats.csv"), result)?;
    write_retention_csv(&dir.join("retention.csv"), result)?;
    let finals: Vec<(usize, String, f64)> = result
        .tasks
        .iter()
        .zip(&result.final_fitness)
        .enumerate()
        .map(|(i, (t, f))| (i, t.to_string(), *f))
        .collect();
    write_rows(
        &dir.join("final.csv"),
        &finals,
        &["task_index", "task_id", "fitness"],
    )?;
    write_json(&dir.join("result.json"), result)?;
    write_text(&dir.join("best_genome.txt"), &result.best_genome)?;
    if let Some(config) = config {
        write_text(&dir.join("config.conf"), &config.to_config().to_string())?;
    }
    Ok(())
}

pub fn read_result(path: &Path) -> Result<RunResult, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes `sweep.csv` (one row per final individual) and
/// `sweep_summary.csv` (one row per λ configuration).
pub fn write_sweep(dir: &Path, table: &SweepTable) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write_rows(
        &dir.join("sweep.csv"),
        &table.rows,
        &[
            "lambda1",
            "lambda2",
            "individual_index",
            "penalty",
            "task1_fitness",
            "task2_fitness",
        ],
    )?;
    write_rows(
        &dir.join("sweep_summary.csv"),
        &table.cells,
        &[
            "lambda1",
            "lambda2",
            "repeats",
            "mean_task1",
            "mean_task2",
            "spearman",
        ],
    )
}

/// Writes `summary.json`, `summary.csv`, `retention_summary.csv` and one
/// directory per run under `runs/`.
pub fn write_comparison(dir: &Path, comparison: &Comparison) -> Result<Vec<PathBuf>, HarnessError> {
    ensure_dir(dir)?;
    write_json(&dir.join("summary.json"), &comparison.summaries)?;
    let rows: Vec<(String, f64, f64, usize)> = comparison
        .summaries
        .iter()
        .map(|s| {
            (
                s.technique.to_string(),
                s.mean_overall,
                s.best_overall,
                s.repeats,
            )
        })
        .collect();
    write_rows(
        &dir.join("summary.csv"),
        &rows,
        &["technique", "mean_overall", "best_overall", "repeats"],
    )?;
    let mut retention = Vec::new();
    for s in &comparison.summaries {
        for (i, v) in s.mean_retention.iter().enumerate() {
            retention.push((s.technique.to_string(), i, *v));
        }
    }
    write_rows(
        &dir.join("retention_summary.csv"),
        &retention,
        &["technique", "after_task_index", "mean_task1_fitness"],
    )?;
    let runs = dir.join("runs");
    let mut written = Vec::new();
    for (repeat, results) in comparison.runs.iter().enumerate() {
        for result in results {
            let run_dir = runs.join(format!("{}_r{repeat:02}", result.technique));
            write_run(&run_dir, result, None)?;
            written.push(run_dir);
        }
    }
    Ok(written)
}
