//! The five control tasks, implemented natively, plus the seeded
//! evaluation protocol that turns a genome into a normalized fitness.

mod acrobot;
mod calibrate;
mod cartpole;
mod evaluate;
mod mountain_car;
mod orientation;
mod pendulum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use acrobot::Acrobot;
pub use calibrate::{calibrate_bounds, CalibrationBudget};
pub use cartpole::CartPole;
pub use evaluate::{evaluate, evaluate_raw, normalize, run_episode};
pub use mountain_car::MountainCar;
pub use orientation::{AgentOrientation, OrientationState};
pub use pendulum::Pendulum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("action {action:?} is not valid for {task}")]
    InvalidAction { task: TaskId, action: Action },
    #[error("step called on a finished episode of {0}")]
    Finished(TaskId),
    #[error("invalid task spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    CartPole,
    Pendulum,
    Acrobot,
    MountainCar,
    AgentOrientation,
}

impl TaskId {
    pub const ALL: [TaskId; 5] = [
        TaskId::CartPole,
        TaskId::Pendulum,
        TaskId::Acrobot,
        TaskId::MountainCar,
        TaskId::AgentOrientation,
    ];

    /// Config-file name, e.g. `cart_pole`.
    pub fn name(self) -> &'static str {
        match self {
            TaskId::CartPole => "cart_pole",
            TaskId::Pendulum => "pendulum",
            TaskId::Acrobot => "acrobot",
            TaskId::MountainCar => "mountain_car",
            TaskId::AgentOrientation => "agent_orientation",
        }
    }

    pub fn obs_size(self) -> usize {
        match self {
            TaskId::CartPole => 4,
            TaskId::Pendulum => 3,
            TaskId::Acrobot => 6,
            TaskId::MountainCar => 2,
            TaskId::AgentOrientation => 5,
        }
    }

    pub fn action_kind(self) -> ActionKind {
        match self {
            TaskId::CartPole => ActionKind::Discrete(2),
            TaskId::Pendulum => {
                ActionKind::Box(vec![(-Pendulum::MAX_TORQUE, Pendulum::MAX_TORQUE)])
            }
            TaskId::Acrobot | TaskId::MountainCar | TaskId::AgentOrientation => {
                ActionKind::Discrete(3)
            }
        }
    }

    pub fn default_episode_cap(self) -> usize {
        match self {
            TaskId::CartPole | TaskId::Pendulum | TaskId::MountainCar => 200,
            TaskId::Acrobot => 500,
            TaskId::AgentOrientation => AgentOrientation::EPISODE_STEPS,
        }
    }

    pub fn make_env(self, episode_cap: usize) -> Box<dyn Environment> {
        match self {
            TaskId::CartPole => Box::new(CartPole::new(episode_cap)),
            TaskId::Pendulum => Box::new(Pendulum::new(episode_cap)),
            TaskId::Acrobot => Box::new(Acrobot::new(episode_cap)),
            TaskId::MountainCar => Box::new(MountainCar::new(episode_cap)),
            TaskId::AgentOrientation => Box::new(AgentOrientation::new(episode_cap)),
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskId {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match key.as_str() {
            "cart_pole" | "cartpole" => Ok(TaskId::CartPole),
            "pendulum" => Ok(TaskId::Pendulum),
            "acrobot" => Ok(TaskId::Acrobot),
            "mountain_car" | "mountaincar" => Ok(TaskId::MountainCar),
            "agent_orientation" | "agentorientation" | "orientation" => {
                Ok(TaskId::AgentOrientation)
            }
            _ => Err(EnvError::UnknownTask(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    Discrete(usize),
    Box(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// One task instance. Owned by a single episode.
pub trait Environment: Send {
    fn task(&self) -> TaskId;

    /// Reseeds the start state and returns the first observation.
    fn reset(&mut self, seed: u64) -> Vec<f64>;

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError>;

    fn steps(&self) -> usize;
}

/// Resets a fresh environment for `task` with the given seed.
pub fn env_reset(spec: &TaskSpec, seed: u64) -> (Box<dyn Environment>, Vec<f64>) {
    let mut env = spec.task.make_env(spec.episode_cap);
    let obs = env.reset(seed);
    (env, obs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub raw_return: f64,
    pub steps: usize,
    pub terminated_early: bool,
}

/// Everything needed to evaluate a policy on one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub task: TaskId,
    pub obs_size: usize,
    pub action_kind: ActionKind,
    pub episode_cap: usize,
    pub raw_min: f64,
    pub raw_max: f64,
    pub eval_seeds: Vec<u64>,
}

impl TaskSpec {
    pub fn new(
        task: TaskId,
        raw_min: f64,
        raw_max: f64,
        episode_cap: usize,
        eval_seeds: Vec<u64>,
    ) -> Result<Self, EnvError> {
        if !(raw_min < raw_max) {
            return Err(EnvError::InvalidSpec(format!(
                "{task}: raw_min {raw_min} must be below raw_max {raw_max}"
            )));
        }
        if episode_cap == 0 {
            return Err(EnvError::InvalidSpec(format!(
                "{task}: episode_cap must be positive"
            )));
        }
        if eval_seeds.is_empty() {
            return Err(EnvError::InvalidSpec(format!(
                "{task}: at least one evaluation seed required"
            )));
        }
        Ok(Self {
            task,
            obs_size: task.obs_size(),
            action_kind: task.action_kind(),
            episode_cap,
            raw_min,
            raw_max,
            eval_seeds,
        })
    }

    /// Same task with evaluation seeds shifted by `base`.
    pub fn with_seed_base(&self, base: u64) -> Self {
        let mut spec = self.clone();
        spec.eval_seeds = self
            .eval_seeds
            .iter()
            .map(|s| s.wrapping_add(base))
            .collect();
        spec
    }
}
