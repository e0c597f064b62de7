use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Action, EnvError, Environment, StepOutcome, TaskId};

/// Cart-pole balancing with explicit Euler integration.
///
/// Action 0 pushes left, 1 pushes right. Every step taken earns +1.
#[derive(Debug, Clone)]
pub struct CartPole {
    /// `[x, x_dot, theta, theta_dot]`
    pub state: [f64; 4],
    episode_cap: usize,
    steps: usize,
    done: bool,
}

impl CartPole {
    pub const GRAVITY: f64 = 9.8;
    pub const MASS_CART: f64 = 1.0;
    pub const MASS_POLE: f64 = 0.1;
    pub const HALF_LENGTH: f64 = 0.5;
    pub const FORCE: f64 = 10.0;
    pub const TAU: f64 = 0.02;
    pub const THETA_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
    pub const X_LIMIT: f64 = 2.4;

    pub fn new(episode_cap: usize) -> Self {
        Self {
            state: [0.0; 4],
            episode_cap,
            steps: 0,
            done: false,
        }
    }

    /// Starts from an explicit state instead of a seeded draw.
    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
        self.steps = 0;
        self.done = false;
    }

    fn failed(&self) -> bool {
        let [x, _, theta, _] = self.state;
        x.abs() > Self::X_LIMIT || theta.abs() > Self::THETA_LIMIT
    }
}

impl Environment for CartPole {
    fn task(&self) -> TaskId {
        TaskId::CartPole
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = [0.0; 4];
        for v in &mut s {
            *v = rng.gen_range(-0.05..0.05);
        }
        self.set_state(s);
        s.to_vec()
    }

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished(TaskId::CartPole));
        }
        let force = match action {
            Action::Discrete(0) => -Self::FORCE,
            Action::Discrete(1) => Self::FORCE,
            other => {
                return Err(EnvError::InvalidAction {
                    task: TaskId::CartPole,
                    action: other.clone(),
                })
            }
        };
        let [x, x_dot, theta, theta_dot] = self.state;
        let total_mass = Self::MASS_CART + Self::MASS_POLE;
        let pole_ml = Self::MASS_POLE * Self::HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();

        let temp = (force + pole_ml * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (Self::GRAVITY * sin - cos * temp)
            / (Self::HALF_LENGTH * (4.0 / 3.0 - Self::MASS_POLE * cos * cos / total_mass));
        let x_acc = temp - pole_ml * theta_acc * cos / total_mass;

        self.state = [
            x + Self::TAU * x_dot,
            x_dot + Self::TAU * x_acc,
            theta + Self::TAU * theta_dot,
            theta_dot + Self::TAU * theta_acc,
        ];
        self.steps += 1;
        self.done = self.failed() || self.steps >= self.episode_cap;
        Ok(StepOutcome {
            observation: self.state.to_vec(),
            reward: 1.0,
            done: self.done,
        })
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
