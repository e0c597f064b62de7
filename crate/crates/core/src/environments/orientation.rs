use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Action, EnvError, Environment, StepOutcome, TaskId};

/// Falling-circle tracking task with five upward distance sensors.
///
/// Circles fall faster sideways than the agent can move, so they leave
/// the sensor fan; catching up requires remembering which way the circle
/// was heading when it bounced off a wall. Coordinates have `y` measured
/// up from the floor where the agent sits.
#[derive(Debug, Clone)]
pub struct AgentOrientation {
    state: OrientationState,
    rng: ChaCha8Rng,
    episode_cap: usize,
    steps: usize,
    done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrientationState {
    pub agent_x: f64,
    pub circle_x: f64,
    pub circle_y: f64,
    pub circle_vx: f64,
    pub circles_dropped: usize,
}

impl AgentOrientation {
    pub const WIDTH: f64 = 400.0;
    pub const HEIGHT: f64 = 300.0;
    pub const AGENT_WIDTH: f64 = 30.0;
    pub const AGENT_SPEED: f64 = 4.0;
    pub const CIRCLE_RADIUS: f64 = 15.0;
    pub const FALL_SPEED: f64 = 3.0;
    pub const CIRCLE_SPEED: f64 = 6.0;
    pub const CIRCLES: usize = 4;
    pub const SENSOR_RANGE: f64 = 300.0;
    pub const SENSOR_ANGLES_DEG: [f64; 5] = [-45.0, -22.5, 0.0, 22.5, 45.0];
    /// Steps for one circle to fall from the top to the floor.
    pub const STEPS_PER_CIRCLE: usize = 90;
    pub const EPISODE_STEPS: usize = Self::CIRCLES * Self::STEPS_PER_CIRCLE;

    pub fn new(episode_cap: usize) -> Self {
        Self {
            state: OrientationState {
                agent_x: Self::WIDTH / 2.0,
                circle_x: Self::WIDTH / 2.0,
                circle_y: Self::HEIGHT - Self::CIRCLE_RADIUS,
                circle_vx: Self::CIRCLE_SPEED,
                circles_dropped: 0,
            },
            rng: ChaCha8Rng::seed_from_u64(0),
            episode_cap,
            steps: 0,
            done: false,
        }
    }

    pub fn state(&self) -> &OrientationState {
        &self.state
    }

    pub fn set_state(&mut self, state: OrientationState) {
        self.state = state;
        self.steps = 0;
        self.done = false;
    }

    fn spawn_circle(&mut self) {
        let r = Self::CIRCLE_RADIUS;
        self.state.circle_x = self.rng.gen_range(r..=Self::WIDTH - r);
        self.state.circle_y = Self::HEIGHT - r;
        self.state.circle_vx = if self.rng.gen_bool(0.5) {
            Self::CIRCLE_SPEED
        } else {
            -Self::CIRCLE_SPEED
        };
    }

    /// Normalized distance along each sensor ray to the circle, 1 when
    /// the ray misses or the hit is beyond sensor range.
    pub fn observation(&self) -> Vec<f64> {
        let s = &self.state;
        Self::SENSOR_ANGLES_DEG
            .iter()
            .map(|deg| {
                let a = deg.to_radians();
                let (dx, dy) = (a.sin(), a.cos());
                let fx = s.agent_x - s.circle_x;
                let fy = -s.circle_y;
                let b = fx * dx + fy * dy;
                let c = fx * fx + fy * fy - Self::CIRCLE_RADIUS * Self::CIRCLE_RADIUS;
                let disc = b * b - c;
                if disc < 0.0 {
                    return 1.0;
                }
                let root = disc.sqrt();
                let t = if -b - root >= 0.0 {
                    -b - root
                } else {
                    -b + root
                };
                if (0.0..=Self::SENSOR_RANGE).contains(&t) {
                    t / Self::SENSOR_RANGE
                } else {
                    1.0
                }
            })
            .collect()
    }
}

impl Environment for AgentOrientation {
    fn task(&self) -> TaskId {
        TaskId::AgentOrientation
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.state.agent_x = Self::WIDTH / 2.0;
        self.state.circles_dropped = 0;
        self.spawn_circle();
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::Finished(TaskId::AgentOrientation));
        }
        let dx = match action {
            Action::Discrete(a) if *a < 3 => (*a as f64 - 1.0) * Self::AGENT_SPEED,
            other => {
                return Err(EnvError::InvalidAction {
                    task: TaskId::AgentOrientation,
                    action: other.clone(),
                })
            }
        };
        let half = Self::AGENT_WIDTH / 2.0;
        let r = Self::CIRCLE_RADIUS;
        let s = &mut self.state;
        s.agent_x = (s.agent_x + dx).clamp(half, Self::WIDTH - half);

        s.circle_x += s.circle_vx;
        if s.circle_x < r {
            s.circle_x = 2.0 * r - s.circle_x;
            s.circle_vx = -s.circle_vx;
        } else if s.circle_x > Self::WIDTH - r {
            s.circle_x = 2.0 * (Self::WIDTH - r) - s.circle_x;
            s.circle_vx = -s.circle_vx;
        }
        s.circle_y -= Self::FALL_SPEED;

        let mut reward = 0.0;
        if s.circle_y <= r {
            reward = (1.0 - (s.agent_x - s.circle_x).abs() / Self::WIDTH).max(0.0);
            s.circles_dropped += 1;
            if s.circles_dropped < Self::CIRCLES {
                self.spawn_circle();
            }
        }
        self.steps += 1;
        self.done = self.state.circles_dropped >= Self::CIRCLES || self.steps >= self.episode_cap;
        Ok(StepOutcome {
            observation: self.observation(),
            reward,
            done: self.done,
        })
    }

    fn steps(&self) -> usize {
        self.steps
    }
}
