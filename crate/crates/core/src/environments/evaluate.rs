use crate::genome::{Genome, Topology};
use crate::network::{decode, interpret_box, interpret_discrete, RnnParameters, RnnState};

use super::{Action, ActionKind, EpisodeResult, TaskSpec};

/// Rolls out one seeded episode with a fresh network state. `None` means
/// the network produced a non-finite value somewhere along the way.
pub fn run_episode(params: &RnnParameters, spec: &TaskSpec, seed: u64) -> Option<EpisodeResult> {
    let mut env = spec.task.make_env(spec.episode_cap);
    let mut obs = env.reset(seed);
    let mut state = RnnState::reset(params.topology());
    let mut raw_return = 0.0;
    let mut done = false;
    while !done {
        let out = params.step_in_place(&mut state, &obs).ok()?;
        let action = match &spec.action_kind {
            ActionKind::Discrete(n) => Action::Discrete(interpret_discrete(out, *n)),
            ActionKind::Box(bounds) => Action::Continuous(interpret_box(out, bounds)),
        };
        let step = env.step(&action).ok()?;
        raw_return += step.reward;
        obs = step.observation;
        done = step.done;
    }
    let steps = env.steps();
    Some(EpisodeResult {
        raw_return,
        steps,
        terminated_early: steps < spec.episode_cap,
    })
}

/// Mean raw return over the task's evaluation seeds. A failed episode
/// counts as `raw_min`.
pub fn evaluate_raw(genome: &Genome, spec: &TaskSpec, topology: Topology) -> f64 {
    let Ok(params) = decode(genome, topology) else {
        return spec.raw_min;
    };
    let total: f64 = spec
        .eval_seeds
        .iter()
        .map(|seed| match run_episode(&params, spec, *seed) {
            Some(ep) if ep.raw_return.is_finite() => ep.raw_return,
            _ => spec.raw_min,
        })
        .sum();
    total / spec.eval_seeds.len() as f64
}

/// Normalized task fitness in `[0, 1]`.
pub fn evaluate(genome: &Genome, spec: &TaskSpec, topology: Topology) -> f64 {
    normalize(evaluate_raw(genome, spec, topology), spec)
}

pub fn normalize(raw: f64, spec: &TaskSpec) -> f64 {
    if raw.is_nan() {
        return 0.0;
    }
    ((raw - spec.raw_min) / (spec.raw_max - spec.raw_min)).clamp(0.0, 1.0)
}
