//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! technique = wp_modularity
//! tasks = cart_pole, pendulum, mountain_car, agent_orientation
//! generations_per_task = 40
//! seed = 7
//! wp.lambda1 = 0.035
//! task.cart_pole.raw_max = 200
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::environments::{TaskId, TaskSpec};
use crate::evolution::EvolutionConfig;
use crate::genome::Topology;
use crate::weight_protection::WpConfig;

/// Calibrated per-task bounds shipped with the crate.
pub const DEFAULT_TASKS: &str = include_str!("../../config/tasks.conf");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                key: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Entries of `other` override entries of `self`.
    pub fn merged(mut self, other: &ConfigMap) -> Self {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| HarnessError::Config {
                    key: key.to_string(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get_parsed(key)?.unwrap_or(default))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.entries.iter()
    }
}

impl fmt::Display for ConfigMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Normal,
    Modularity,
    Wp,
    WpModularity,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Normal,
        Technique::Modularity,
        Technique::Wp,
        Technique::WpModularity,
    ];

    pub fn from_flags(wp: bool, modularity: bool) -> Self {
        match (wp, modularity) {
            (false, false) => Technique::Normal,
            (false, true) => Technique::Modularity,
            (true, false) => Technique::Wp,
            (true, true) => Technique::WpModularity,
        }
    }

    pub fn uses_wp(self) -> bool {
        matches!(self, Technique::Wp | Technique::WpModularity)
    }

    pub fn uses_modularity(self) -> bool {
        matches!(self, Technique::Modularity | Technique::WpModularity)
    }

    pub fn name(self) -> &'static str {
        match self {
            Technique::Normal => "normal",
            Technique::Modularity => "modularity",
            Technique::Wp => "wp",
            Technique::WpModularity => "wp_modularity",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '+', '&', ' '], "_")
            .as_str()
        {
            "normal" => Ok(Technique::Normal),
            "modularity" | "mod" => Ok(Technique::Modularity),
            "wp" => Ok(Technique::Wp),
            "wp_modularity" | "wp_mod" | "wp__modularity" => Ok(Technique::WpModularity),
            other => Err(format!("unknown technique `{other}`")),
        }
    }
}

/// Bounds and protocol for every task, keyed by task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskTable {
    specs: BTreeMap<TaskId, TaskSpec>,
}

impl TaskTable {
    pub fn from_config(map: &ConfigMap) -> Result<Self, HarnessError> {
        let mut specs = BTreeMap::new();
        for task in TaskId::ALL {
            let key = |field: &str| format!("task.{}.{field}", task.name());
            let raw_min: Option<f64> = map.get_parsed(&key("raw_min"))?;
            let raw_max: Option<f64> = map.get_parsed(&key("raw_max"))?;
            let (Some(raw_min), Some(raw_max)) = (raw_min, raw_max) else {
                continue;
            };
            let cap = map.or(&key("episode_cap"), task.default_episode_cap())?;
            let seeds = match map.get(&key("seeds")) {
                Some(s) => parse_list::<u64>(s).map_err(|m| HarnessError::Config {
                    key: key("seeds"),
                    message: m,
                })?,
                None => vec![1, 2, 3, 4, 5],
            };
            let spec = TaskSpec::new(task, raw_min, raw_max, cap, seeds).map_err(|e| {
                HarnessError::Config {
                    key: key("raw_min"),
                    message: e.to_string(),
                }
            })?;
            specs.insert(task, spec);
        }
        Ok(Self { specs })
    }

    pub fn defaults() -> Self {
        Self::from_config(&ConfigMap::parse(DEFAULT_TASKS).expect("bundled task config parses"))
            .expect("bundled task config is valid")
    }

    pub fn get(&self, task: TaskId) -> Result<&TaskSpec, HarnessError> {
        self.specs.get(&task).ok_or_else(|| HarnessError::Config {
            key: format!("task.{}", task.name()),
            message: "no raw bounds configured for this task".into(),
        })
    }

    pub fn insert(&mut self, spec: TaskSpec) {
        self.specs.insert(spec.task, spec);
    }

    /// Config lines for every task in the table.
    pub fn to_config(&self) -> ConfigMap {
        let mut map = ConfigMap::default();
        for (task, spec) in &self.specs {
            let name = task.name();
            map.set(&format!("task.{name}.raw_min"), spec.raw_min);
            map.set(&format!("task.{name}.raw_max"), spec.raw_max);
            map.set(&format!("task.{name}.episode_cap"), spec.episode_cap);
            let seeds: Vec<String> = spec.eval_seeds.iter().map(u64::to_string).collect();
            map.set(&format!("task.{name}.seeds"), seeds.join(", "));
        }
        map
    }
}

pub(crate) fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub technique: Technique,
    pub task_sequence: Vec<TaskId>,
    pub generations_per_task: usize,
    /// When set, tasks rotate whenever the population mean reaches it.
    pub threshold: Option<f64>,
    pub generation_cap: usize,
    pub evolution: EvolutionConfig,
    pub wp: WpConfig,
    pub tasks: TaskTable,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            technique: Technique::WpModularity,
            task_sequence: vec![
                TaskId::CartPole,
                TaskId::Pendulum,
                TaskId::MountainCar,
                TaskId::AgentOrientation,
            ],
            generations_per_task: 40,
            threshold: None,
            generation_cap: 2000,
            evolution: EvolutionConfig::default(),
            wp: WpConfig::default(),
            tasks: TaskTable::defaults(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Builds a config from defaults overlaid with `map`.
    pub fn from_map(map: &ConfigMap) -> Result<Self, HarnessError> {
        let base = ConfigMap::parse(DEFAULT_TASKS)?.merged(map);
        let d = RunConfig::default();
        let ev = &d.evolution;

        let mut technique = base
            .or("technique", d.technique)
            .map_err(|e| e.with_key("technique"))?;
        let wp_on = base.or("wp.enabled", technique.uses_wp())?;
        let mod_on = base.or("modularity.enabled", technique.uses_modularity())?;
        technique = Technique::from_flags(wp_on, mod_on);

        let task_sequence = match base.get("tasks") {
            Some(s) => parse_list::<TaskId>(s).map_err(|m| HarnessError::Config {
                key: "tasks".into(),
                message: m,
            })?,
            None => d.task_sequence.clone(),
        };
        let topology = Topology::new(
            Topology::standard().input_size,
            base.or("evolution.hidden_size", Topology::standard().hidden_size)?,
            Topology::standard().output_size,
        )
        .map_err(|e| HarnessError::Config {
            key: "evolution.hidden_size".into(),
            message: e.to_string(),
        })?;

        let evolution = EvolutionConfig {
            population_size: base.or("evolution.population_size", ev.population_size)?,
            crossover_prob: base.or("evolution.crossover_prob", ev.crossover_prob)?,
            mutation_prob: base.or("evolution.mutation_prob", ev.mutation_prob)?,
            per_gene_prob: base.or("evolution.per_gene_prob", ev.per_gene_prob)?,
            structural_prob: base.or("evolution.structural_prob", ev.structural_prob)?,
            gaussian_sigma: base.or("evolution.gaussian_sigma", ev.gaussian_sigma)?,
            init_fraction: base.or("evolution.init_fraction", ev.init_fraction)?,
            topology,
            master_seed: base.or("seed", ev.master_seed)?,
        };
        let wp = WpConfig {
            lambda1: base.or("wp.lambda1", d.wp.lambda1)?,
            lambda2: base.or("wp.lambda2", d.wp.lambda2)?,
            p: base.or("wp.p", d.wp.p)?,
        };

        let config = RunConfig {
            technique,
            task_sequence,
            generations_per_task: base.or("generations_per_task", d.generations_per_task)?,
            threshold: base.get_parsed("threshold")?,
            generation_cap: base.or("generation_cap", d.generation_cap)?,
            evolution,
            wp,
            tasks: TaskTable::from_config(&base)?,
            output_dir: base.or("output_dir", d.output_dir)?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_map(&ConfigMap::load(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: &str, message: String| {
            Err(HarnessError::Config {
                key: key.into(),
                message,
            })
        };
        if self.task_sequence.is_empty() {
            return bad("tasks", "task sequence is empty".into());
        }
        for task in &self.task_sequence {
            self.tasks.get(*task)?;
        }
        if self.threshold.is_none() && self.generations_per_task == 0 {
            return bad(
                "generations_per_task",
                "must be at least 1 without a threshold".into(),
            );
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                return bad("threshold", format!("{t} is outside [0, 1]"));
            }
        }
        self.evolution
            .validate()
            .map_err(|e| HarnessError::Config {
                key: "evolution".into(),
                message: e.to_string(),
            })?;
        self.wp.validate().map_err(|e| HarnessError::Config {
            key: "wp".into(),
            message: e.to_string(),
        })?;
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.evolution.master_seed
    }

    /// The effective configuration as `key = value` lines.
    pub fn to_config(&self) -> ConfigMap {
        let mut map = self.tasks.to_config();
        let ev = &self.evolution;
        map.set("technique", self.technique);
        map.set("wp.enabled", self.technique.uses_wp());
        map.set("modularity.enabled", self.technique.uses_modularity());
        let tasks: Vec<&str> = self.task_sequence.iter().map(|t| t.name()).collect();
        map.set("tasks", tasks.join(", "));
        map.set("generations_per_task", self.generations_per_task);
        if let Some(t) = self.threshold {
            map.set("threshold", t);
        }
        map.set("generation_cap", self.generation_cap);
        map.set("seed", ev.master_seed);
        map.set("evolution.population_size", ev.population_size);
        map.set("evolution.crossover_prob", ev.crossover_prob);
        map.set("evolution.mutation_prob", ev.mutation_prob);
        map.set("evolution.per_gene_prob", ev.per_gene_prob);
        map.set("evolution.structural_prob", ev.structural_prob);
        map.set("evolution.gaussian_sigma", ev.gaussian_sigma);
        map.set("evolution.init_fraction", ev.init_fraction);
        map.set("evolution.hidden_size", ev.topology.hidden_size);
        map.set("wp.lambda1", self.wp.lambda1);
        map.set("wp.lambda2", self.wp.lambda2);
        map.set("wp.p", self.wp.p);
        map.set("output_dir", self.output_dir.display());
        map
    }
}
