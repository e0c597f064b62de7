use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wp_neuroevo::environments::{
    calibrate_bounds, evaluate_raw, normalize, CalibrationBudget, TaskId, TaskSpec,
};
use wp_neuroevo::harness::{
    self, lambda_sweep, read_result, technique_comparison, write_comparison, write_retention_csv,
    write_run, write_stats_csv, write_sweep, ConfigMap, HarnessError, RunConfig, TaskTable,
    DEFAULT_GRID,
};
use wp_neuroevo::Genome;

#[derive(Parser)]
#[command(
    name = "wpevo",
    version,
    about = "Weight-protected neuroevolution across task sequences"
)]
struct Cli {
    /// Master seed; overrides `seed` in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration (continual, or threshold loop if `threshold` is set).
    Run,
    /// Sweep (λ1, λ2) over a two-task sequence.
    Sweep {
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Comma-separated `λ1:λ2` pairs.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Compare the four techniques with paired seeds.
    Compare {
        #[arg(long, default_value_t = 10)]
        repeats: usize,
    },
    /// Estimate raw return bounds for tasks by evolving on raw return.
    Calibrate {
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long, default_value_t = 40)]
        generations: usize,
        /// Comma-separated task names; all tasks by default.
        #[arg(long)]
        tasks: Option<String>,
    },
    /// Evaluate a saved genome on one task.
    Eval {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long)]
        task: TaskId,
    },
    /// Convert a saved `result.json` into `stats.csv` and `retention.csv`.
    Export {
        #[arg(long)]
        result: PathBuf,
    },
}

enum Failure {
    Usage(HarnessError),
    Runtime(HarnessError),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Subcommand defaults, then the config file, then command-line flags.
fn load_config(cli: &Cli, defaults: &[(&str, &str)]) -> Result<RunConfig, Failure> {
    let mut map = ConfigMap::default();
    for (k, v) in defaults {
        map.set(k, v);
    }
    if let Some(path) = &cli.config {
        map = map.merged(&ConfigMap::load(path).map_err(Failure::Usage)?);
    }
    if let Some(seed) = cli.seed {
        map.set("seed", seed);
    }
    if let Some(out) = &cli.out {
        map.set("output_dir", out.display());
    }
    RunConfig::from_map(&map).map_err(Failure::Usage)
}

fn parse_grid(s: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let bad = |m: String| {
        Failure::Usage(HarnessError::Config {
            key: "--grid".into(),
            message: m,
        })
    };
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| bad(format!("`{pair}` is not `l1:l2`")))?;
            let a = a
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("`{a}`: {e}")))?;
            let b = b
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("`{b}`: {e}")))?;
            Ok((a, b))
        })
        .collect()
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run => {
            let config = load_config(cli, &[])?;
            let result = harness::run(&config)?;
            write_run(&config.output_dir, &result, Some(&config))?;
            println!("overall fitness {}", result.overall_fitness());
            for (task, fit) in result.tasks.iter().zip(&result.final_fitness) {
                println!("{task} {fit}");
            }
            if let Some(t) = &result.threshold {
                println!(
                    "converged {} after {} generations, visits {:?}",
                    t.converged, t.generations, t.visits
                );
            }
        }
        Command::Sweep { repeats, grid } => {
            let config = load_config(
                cli,
                &[
                    ("tasks", "pendulum, acrobot"),
                    ("technique", "wp_modularity"),
                ],
            )?;
            let grid = match grid {
                Some(g) => parse_grid(g)?,
                None => DEFAULT_GRID.to_vec(),
            };
            let table = lambda_sweep(&config, &grid, *repeats)?;
            write_sweep(&config.output_dir, &table)?;
            for c in &table.cells {
                let rho = c
                    .spearman
                    .map_or("undefined".to_string(), |r| r.to_string());
                println!(
                    "lambda1 {} lambda2 {} task1 {} task2 {} spearman {rho}",
                    c.lambda1, c.lambda2, c.mean_task1, c.mean_task2
                );
            }
        }
        Command::Compare { repeats } => {
            let config = load_config(cli, &[])?;
            let comparison = technique_comparison(&config, *repeats)?;
            let runs = write_comparison(&config.output_dir, &comparison)?;
            for s in &comparison.summaries {
                println!(
                    "{} mean {} best {}",
                    s.technique, s.mean_overall, s.best_overall
                );
            }
            println!("{} run directories", runs.len());
        }
        Command::Calibrate {
            runs,
            generations,
            tasks,
        } => {
            let config = load_config(cli, &[])?;
            let tasks = match tasks {
                Some(s) => s
                    .split(',')
                    .map(|t| t.trim().parse::<TaskId>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Failure::Usage(e.into()))?,
                None => TaskId::ALL.to_vec(),
            };
            let budget = CalibrationBudget {
                runs: *runs,
                generations: *generations,
            };
            let mut table = TaskTable::defaults();
            for task in tasks {
                let old = config.tasks.get(task)?;
                let (lo, hi) =
                    calibrate_bounds(old, budget, &config.evolution).map_err(HarnessError::from)?;
                println!("{task} raw_min {lo} raw_max {hi}");
                table.insert(
                    TaskSpec::new(task, lo, hi, old.episode_cap, old.eval_seeds.clone())
                        .map_err(HarnessError::from)?,
                );
            }
            let path = config.output_dir.join("tasks.conf");
            make_dir(&config.output_dir)?;
            std::fs::write(&path, table.to_config().to_string()).map_err(|source| {
                HarnessError::Io {
                    path: path.clone(),
                    source,
                }
            })?;
        }
        Command::Eval { genome, task } => {
            let config = load_config(cli, &[])?;
            let text = read(genome)?;
            let genome: Genome = text
                .parse()
                .map_err(|e| Failure::Usage(HarnessError::from(e)))?;
            let spec = config.tasks.get(*task)?.with_seed_base(config.seed());
            let raw = evaluate_raw(&genome, &spec, genome.topology());
            println!("{task} raw {raw} fitness {}", normalize(raw, &spec));
        }
        Command::Export { result } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let result = read_result(result).map_err(Failure::Usage)?;
            make_dir(&out)?;
            write_stats_csv(&out.join("stats.csv"), &result)?;
            write_retention_csv(&out.join("retention.csv"), &result)?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|source| {
        Failure::Usage(HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn make_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|source| {
        Failure::Runtime(HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}
