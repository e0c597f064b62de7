use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Action, EnvError, Environment, StepOutcome, TaskId};

/// Under-powered car in a valley. Actions 0/1/2: reverse, coast,
/// accelerate. Costs 1 per step until the goal flag at x = 0.5.
#[derive(Debug, Clone)]
pub struct MountainCar {
    pub position: f64,
    pub velocity: f64,
    episode_cap: usize,
    steps: usize,
    done: bool,
}

impl MountainCar {
    pub const MIN_POSITION: f64 = -1.2;
    pub const MAX_POSITION: f64 = 0.6;
    pub const MAX_SPEED: f64 = 0.07;
    pub const GOAL_POSITION: f64 = 0.5;
    pub const FORCE: f64 = 0.001;
    pub const GRAVITY: f64 = 0.0025;

    pub fn new(episode_cap: usize) -> Self {
        Self {
            position: 0.0,
            velocity: 0.0,
            episode_cap,
            steps: 0,
            done: false,
        }
    }

    pub fn set_state(&mut self, position: f64, velocity: f64) {
        self.position = position;
        self.velocity = velocity;
        self.steps = 0;
        self.done = false;
    }

    pub fn at_goal(&self) -> bool {
        self.position >= Self::GOAL_POSITION
    }
}

impl Environment for MountainCar {
    fn task(&self) -> TaskId {
        TaskId::MountainCar
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.set_state(rng.gen_range(-0.6..-0.4), 0.0);
        vec![self.position, self.velocity]
    }

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished(TaskId::MountainCar));
        }
        let push = match action {
            Action::Discrete(a) if *a < 3 => *a as f64 - 1.0,
            other => {
                return Err(EnvError::InvalidAction {
                    task: TaskId::MountainCar,
                    action: other.clone(),
                })
            }
        };
        let mut v =
            self.velocity + push * Self::FORCE - Self::GRAVITY * (3.0 * self.position).cos();
        v = v.clamp(-Self::MAX_SPEED, Self::MAX_SPEED);
        let x = (self.position + v).clamp(Self::MIN_POSITION, Self::MAX_POSITION);
        if x == Self::MIN_POSITION && v < 0.0 {
            v = 0.0;
        }
        self.position = x;
        self.velocity = v;
        self.steps += 1;
        self.done = self.at_goal() || self.steps >= self.episode_cap;
        Ok(StepOutcome {
            observation: vec![x, v],
            reward: -1.0,
            done: self.done,
        })
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
