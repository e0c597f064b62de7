use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pendulum::angle_normalize;
use super::{Action, EnvError, Environment, StepOutcome, TaskId};

/// Two-link underactuated swing-up, integrated with one RK4 step per
/// action. Actions 0/1/2 apply torque -1/0/+1 at the joint.
#[derive(Debug, Clone)]
pub struct Acrobot {
    /// `[θ1, θ2, θ̇1, θ̇2]`
    pub state: [f64; 4],
    episode_cap: usize,
    steps: usize,
    done: bool,
}

const LINK_LENGTH_1: f64 = 1.0;
const LINK_MASS_1: f64 = 1.0;
const LINK_MASS_2: f64 = 1.0;
const LINK_COM_1: f64 = 0.5;
const LINK_COM_2: f64 = 0.5;
const LINK_MOI: f64 = 1.0;
const GRAVITY: f64 = 9.8;
const MAX_VEL_1: f64 = 4.0 * PI;
const MAX_VEL_2: f64 = 9.0 * PI;
const TORQUES: [f64; 3] = [-1.0, 0.0, 1.0];

impl Acrobot {
    pub const DT: f64 = 0.2;

    pub fn new(episode_cap: usize) -> Self {
        Self {
            state: [0.0; 4],
            episode_cap,
            steps: 0,
            done: false,
        }
    }

    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
        self.steps = 0;
        self.done = false;
    }

    fn observation(&self) -> Vec<f64> {
        let [t1, t2, d1, d2] = self.state;
        vec![t1.cos(), t1.sin(), t2.cos(), t2.sin(), d1, d2]
    }

    /// Tip height above the pivot in link lengths; the goal is > 1.
    pub fn tip_height(&self) -> f64 {
        let [t1, t2, ..] = self.state;
        -t1.cos() - (t1 + t2).cos()
    }
}

fn derivatives(s: [f64; 4], torque: f64) -> [f64; 4] {
    let (m1, m2) = (LINK_MASS_1, LINK_MASS_2);
    let (l1, lc1, lc2) = (LINK_LENGTH_1, LINK_COM_1, LINK_COM_2);
    let (i1, i2) = (LINK_MOI, LINK_MOI);
    let g = GRAVITY;
    let [theta1, theta2, dtheta1, dtheta2] = s;

    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 =
        (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin() - phi2)
            / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2]
}

fn rk4(s: [f64; 4], torque: f64, dt: f64) -> [f64; 4] {
    let add =
        |a: [f64; 4], k: [f64; 4], h: f64| -> [f64; 4] { std::array::from_fn(|i| a[i] + h * k[i]) };
    let k1 = derivatives(s, torque);
    let k2 = derivatives(add(s, k1, dt / 2.0), torque);
    let k3 = derivatives(add(s, k2, dt / 2.0), torque);
    let k4 = derivatives(add(s, k3, dt), torque);
    std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

impl Environment for Acrobot {
    fn task(&self) -> TaskId {
        TaskId::Acrobot
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = [0.0; 4];
        for v in &mut s {
            *v = rng.gen_range(-0.1..0.1);
        }
        self.set_state(s);
        self.observation()
    }

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished(TaskId::Acrobot));
        }
        let torque = match action {
            Action::Discrete(a) if *a < 3 => TORQUES[*a],
            other => {
                return Err(EnvError::InvalidAction {
                    task: TaskId::Acrobot,
                    action: other.clone(),
                })
            }
        };
        let ns = rk4(self.state, torque, Self::DT);
        self.state = [
            angle_normalize(ns[0]),
            angle_normalize(ns[1]),
            ns[2].clamp(-MAX_VEL_1, MAX_VEL_1),
            ns[3].clamp(-MAX_VEL_2, MAX_VEL_2),
        ];
        self.steps += 1;
        let reached = self.tip_height() > 1.0;
        self.done = reached || self.steps >= self.episode_cap;
        Ok(StepOutcome {
            observation: self.observation(),
            reward: if reached { 0.0 } else { -1.0 },
            done: self.done,
        })
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
