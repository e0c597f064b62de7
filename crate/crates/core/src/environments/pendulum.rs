use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Action, EnvError, Environment, StepOutcome, TaskId};

/// Pendulum swing-up. Angle 0 is upright; the observation is
/// `[cos θ, sin θ, θ̇]` and the single action is a torque in `[-2, 2]`.
#[derive(Debug, Clone)]
pub struct Pendulum {
    pub theta: f64,
    pub theta_dot: f64,
    episode_cap: usize,
    steps: usize,
    done: bool,
}

impl Pendulum {
    pub const MAX_SPEED: f64 = 8.0;
    pub const MAX_TORQUE: f64 = 2.0;
    pub const DT: f64 = 0.05;
    pub const G: f64 = 10.0;
    pub const MASS: f64 = 1.0;
    pub const LENGTH: f64 = 1.0;

    pub fn new(episode_cap: usize) -> Self {
        Self {
            theta: 0.0,
            theta_dot: 0.0,
            episode_cap,
            steps: 0,
            done: false,
        }
    }

    pub fn set_state(&mut self, theta: f64, theta_dot: f64) {
        self.theta = theta;
        self.theta_dot = theta_dot;
        self.steps = 0;
        self.done = false;
    }

    fn observation(&self) -> Vec<f64> {
        vec![self.theta.cos(), self.theta.sin(), self.theta_dot]
    }
}

/// Wraps an angle into `[-π, π)`.
pub(crate) fn angle_normalize(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

impl Environment for Pendulum {
    fn task(&self) -> TaskId {
        TaskId::Pendulum
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = rng.gen_range(-PI..PI);
        let theta_dot = rng.gen_range(-1.0..1.0);
        self.set_state(theta, theta_dot);
        self.observation()
    }

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished(TaskId::Pendulum));
        }
        let u = match action {
            Action::Continuous(v) if v.len() == 1 && v[0].abs() <= Self::MAX_TORQUE => v[0],
            other => {
                return Err(EnvError::InvalidAction {
                    task: TaskId::Pendulum,
                    action: other.clone(),
                })
            }
        };
        let th = self.theta;
        let thdot = self.theta_dot;
        let cost = angle_normalize(th).powi(2) + 0.1 * thdot * thdot + 0.001 * u * u;

        let accel = 3.0 * Self::G / (2.0 * Self::LENGTH) * th.sin()
            + 3.0 / (Self::MASS * Self::LENGTH * Self::LENGTH) * u;
        let new_thdot = (thdot + accel * Self::DT).clamp(-Self::MAX_SPEED, Self::MAX_SPEED);
        self.theta = th + new_thdot * Self::DT;
        self.theta_dot = new_thdot;
        self.steps += 1;
        self.done = self.steps >= self.episode_cap;
        Ok(StepOutcome {
            observation: self.observation(),
            reward: -cost,
            done: self.done,
        })
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
