//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wp_neuroevo::environments::TaskId;
use wp_neuroevo::evolution::{fast_non_dominated_sort, EvolutionConfig};
use wp_neuroevo::genome::{random_genome, Genome, Topology};
use wp_neuroevo::harness::stats::sign_test;
use wp_neuroevo::harness::{
    lambda_sweep, run_continual, run_threshold_loop, technique_comparison, RunConfig, Technique,
};
use wp_neuroevo::network::{interpret_box, interpret_discrete};
use wp_neuroevo::weight_protection::{revised_fitness, wp_penalty, ReferenceModel, WpConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn structural() -> Outcome {
    let n = Topology::standard().parameter_count();
    check(n == 108, format!("parameter_count(6,6,3) = {n}"))
}

fn wp(lambda1: f64, lambda2: f64) -> WpConfig {
    WpConfig {
        lambda1,
        lambda2,
        p: 0.2,
    }
}

fn penalty_identities() -> Outcome {
    let t = Topology::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_self = 0.0f64;
    let mut worst_linear = 0.0f64;
    for _ in 0..200 {
        let r = random_genome(t, rng.gen_range(0.0..1.0), &mut rng);
        let g = random_genome(t, rng.gen_range(0.0..1.0), &mut rng);
        let reference = ReferenceModel::from_genome(&r, vec![TaskId::CartPole]);
        worst_self = worst_self.max(wp_penalty(&r, &reference, &wp(0.035, 0.02)).unwrap().abs());
        let (l1, l2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let full = wp_penalty(&g, &reference, &wp(l1, l2)).unwrap();
        let parts = l1 * wp_penalty(&g, &reference, &wp(1.0, 0.0)).unwrap()
            + l2 * wp_penalty(&g, &reference, &wp(0.0, 1.0)).unwrap();
        worst_linear = worst_linear.max((full - parts).abs());
    }
    let identity = (0..100).all(|k| {
        let f = k as f64 / 99.0;
        revised_fitness(f, 0.0) == f
    });

    let mut rw = vec![0.0; 108];
    let mut rm = vec![false; 108];
    rw[0] = 0.5;
    rm[0] = true;
    let mut gw = vec![0.0; 108];
    let mut gm = vec![false; 108];
    gm[0] = true;
    gw[1] = 2.0;
    gm[1] = true;
    let reference = ReferenceModel {
        weights: rw,
        mask: rm,
        tasks_learned: vec![TaskId::Pendulum],
    };
    let hand = wp_penalty(
        &Genome::new(t, gw, gm).unwrap(),
        &reference,
        &wp(0.035, 0.02),
    )
    .unwrap();

    check(
        worst_self == 0.0 && identity && worst_linear <= 1e-12 && (hand - 0.08875).abs() <= 1e-12,
        format!("max |P(ref,ref)| = {worst_self}, max linearity error = {worst_linear:e}, hand case = {hand}"),
    )
}

/// Peels off non-dominated sets by exhaustive pairwise comparison.
fn brute_force_fronts(objs: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let dominates = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
    };
    let mut remaining: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominates(&objs[j], &objs[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn nsga2_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let n = rng.gen_range(1..=64);
        let m = rng.gen_range(1..=3);
        // a small value grid forces ties and duplicate points
        let levels = rng.gen_range(2..=10);
        let objs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(0..levels) as f64).collect())
            .collect();
        let mut got = fast_non_dominated_sort(&objs).map_err(|e| e.to_string())?;
        let mut want = brute_force_fronts(&objs);
        for f in got.iter_mut().chain(want.iter_mut()) {
            f.sort_unstable();
        }
        if got != want {
            return Err(format!("instance {case} (n={n}, m={m}) differs"));
        }
    }
    Ok("1000 instances match".into())
}

fn interpretation() -> Outcome {
    let a = interpret_discrete(&[-0.5, 0.8, 0.3], 3);
    let b = interpret_box(&[-0.5], &[(-2.0, 2.0)]);
    check(
        a == 1 && b == vec![-1.0],
        format!("discrete -> {a}, box -> {b:?}"),
    )
}

fn elitism() -> Outcome {
    let config = RunConfig {
        task_sequence: vec![TaskId::Pendulum],
        generations_per_task: 60,
        ..RunConfig::default()
    };
    let result = run_continual(&config).map_err(|e| e.to_string())?;
    let maxes: Vec<f64> = result.stats.iter().map(|s| s.max_revised).collect();
    let monotone = maxes.windows(2).all(|w| w[1] >= w[0]);
    check(
        monotone && maxes.len() == 60,
        format!(
            "{} generations, max revised {:.4} -> {:.4}",
            maxes.len(),
            maxes[0],
            maxes[maxes.len() - 1]
        ),
    )
}

const STAT_REPEATS: usize = 30;

fn sweep_correlation() -> Outcome {
    let template = RunConfig {
        technique: Technique::WpModularity,
        task_sequence: vec![TaskId::Pendulum, TaskId::Acrobot],
        generations_per_task: 40,
        ..RunConfig::default()
    };
    let table = lambda_sweep(&template, &[(0.035, 0.02), (0.0, 0.02)], STAT_REPEATS)
        .map_err(|e| e.to_string())?;
    let both = table.cell(0.035, 0.02).and_then(|c| c.spearman);
    let l2_only = table.cell(0.0, 0.02).and_then(|c| c.spearman);
    let detail =
        format!("{STAT_REPEATS} runs each; rho(both) = {both:?}, rho(lambda2 only) = {l2_only:?}");
    match (both, l2_only) {
        (Some(b), Some(c)) => check(b <= -0.3 && b < c, detail),
        _ => Err(detail),
    }
}

fn comparison() -> Result<(Outcome, Outcome), String> {
    let template = RunConfig::default();
    let c = technique_comparison(&template, STAT_REPEATS).map_err(|e| e.to_string())?;
    let overall = |t| c.per_repeat(t, |r| r.overall_fitness());
    let (wpm, normal) = (overall(Technique::WpModularity), overall(Technique::Normal));
    let (wins, n, p) = sign_test(&wpm, &normal);
    let retention = |t| c.summary(t).mean_retention.last().copied().unwrap_or(0.0);
    let (r_normal, r_wp, r_wpm) = (
        retention(Technique::Normal),
        retention(Technique::Wp),
        retention(Technique::WpModularity),
    );
    let (m_wpm, m_normal) = (
        c.summary(Technique::WpModularity).mean_overall,
        c.summary(Technique::Normal).mean_overall,
    );
    let table2 = check(
        m_wpm > m_normal && p < 0.05 && r_wp > r_normal && r_wpm > r_normal,
        format!(
            "{STAT_REPEATS} paired repeats; mean overall wp_modularity {m_wpm:.3} vs normal {m_normal:.3}; sign test {wins}/{n} wins, p = {p:.4}; task-1 retention wp {r_wp:.3}, wp_modularity {r_wpm:.3}, normal {r_normal:.3}"
        ),
    );
    let curves = |t| {
        c.summary(t)
            .mean_retention
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let fig4 = check(
        r_wpm > r_normal,
        format!(
            "retention curve wp_modularity [{}] vs normal [{}]",
            curves(Technique::WpModularity),
            curves(Technique::Normal)
        ),
    );
    Ok((table2, fig4))
}

fn threshold_loop() -> Outcome {
    let mut good = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let mut config = RunConfig {
            technique: Technique::Modularity,
            task_sequence: vec![
                TaskId::CartPole,
                TaskId::MountainCar,
                TaskId::AgentOrientation,
            ],
            threshold: Some(0.95),
            generation_cap: 2000,
            ..RunConfig::default()
        };
        config.wp.p = 0.2;
        config.evolution = EvolutionConfig {
            master_seed: seed,
            ..config.evolution
        };
        let result = run_threshold_loop(&config).map_err(|e| e.to_string())?;
        let t = result.threshold.expect("threshold outcome");
        let ok = t.converged && t.visits.iter().all(|&v| v > 1);
        good += ok as usize;
        notes.push(format!(
            "{}@{}{:?}",
            if t.converged { "conv" } else { "cap" },
            t.generations,
            t.visits
        ));
    }
    check(
        good >= 8,
        format!(
            "{good}/10 converged with every task revisited; {}",
            notes.join(" ")
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wpevo"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let conf = tmp.path().join("small.conf");
    std::fs::write(
        &conf,
        "tasks = cart_pole, pendulum\ngenerations_per_task = 3\nevolution.population_size = 12\n",
    )
    .map_err(|e| e.to_string())?;
    let conf = conf.to_str().unwrap();
    let mut compared = 0;
    let mut outputs = Vec::new();
    for attempt in 0..2 {
        let dir = |name: &str| {
            tmp.path()
                .join(format!("{name}{attempt}"))
                .display()
                .to_string()
        };
        run_cli(&["run", "--config", conf, "--seed", "5", "--out", &dir("run")])?;
        run_cli(&[
            "sweep",
            "--config",
            conf,
            "--seed",
            "5",
            "--repeats",
            "1",
            "--grid",
            "0.035:0.02",
            "--out",
            &dir("sweep"),
        ])?;
        run_cli(&[
            "compare",
            "--config",
            conf,
            "--seed",
            "5",
            "--repeats",
            "2",
            "--out",
            &dir("compare"),
        ])?;
        run_cli(&[
            "calibrate",
            "--seed",
            "5",
            "--runs",
            "1",
            "--generations",
            "2",
            "--tasks",
            "cart_pole",
            "--config",
            conf,
            "--out",
            &dir("calibrate"),
        ])?;
        let genome = tmp
            .path()
            .join(format!("run{attempt}"))
            .join("best_genome.txt");
        let eval = run_cli(&[
            "eval",
            "--genome",
            genome.to_str().unwrap(),
            "--task",
            "acrobot",
            "--seed",
            "5",
        ])?;
        let result = tmp.path().join(format!("run{attempt}")).join("result.json");
        run_cli(&[
            "export",
            "--result",
            result.to_str().unwrap(),
            "--out",
            &dir("export"),
        ])?;
        let mut all = Vec::new();
        for name in ["run", "sweep", "compare", "export"] {
            all.extend(
                csv_files(&tmp.path().join(format!("{name}{attempt}")))
                    .into_iter()
                    .map(|(p, b)| (format!("{name}/{p}"), b)),
            );
        }
        all.push((
            "calibrate/tasks.conf".into(),
            std::fs::read(tmp.path().join(format!("calibrate{attempt}/tasks.conf"))).unwrap(),
        ));
        all.push(("eval stdout".into(), eval));
        outputs.push(all);
    }
    for ((pa, a), (pb, b)) in outputs[0].iter().zip(&outputs[1]) {
        if pa != pb || a != b {
            return Err(format!("{pa} differs between invocations"));
        }
        compared += 1;
    }
    // run: 3 CSVs; sweep: 2; compare: 2 summaries + 2 repeats x 4 techniques
    // x 3 run CSVs; export: 2; plus tasks.conf and the eval printout
    let expected = 3 + 2 + (2 + 2 * 4 * 3) + 2 + 2;
    check(
        outputs[0].len() == outputs[1].len() && compared == expected,
        format!("{compared} outputs byte-identical across 6 subcommands"),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: &str, name: &str, outcome: Outcome, started: Instant| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {id} ({name}): {d} [{secs:.1}s]"),
            Err(d) => {
                failures += 1;
                println!("FAIL criterion {id} ({name}): {d} [{secs:.1}s]");
            }
        }
    };
    let t = Instant::now();
    report("1", "structural", structural(), t);
    let t = Instant::now();
    report("2", "penalty identities", penalty_identities(), t);
    let t = Instant::now();
    report("3", "non-dominated sort oracle", nsga2_oracle(), t);
    let t = Instant::now();
    report("4", "output interpretation", interpretation(), t);
    let t = Instant::now();
    report("5", "elitism", elitism(), t);
    let t = Instant::now();
    report(
        "6",
        "penalty and retention correlation",
        sweep_correlation(),
        t,
    );
    let t = Instant::now();
    match comparison() {
        Ok((table2, fig4)) => {
            report("7", "technique comparison", table2, t);
            report("8", "retention curve", fig4, t);
        }
        Err(e) => {
            report("7", "technique comparison", Err(e.clone()), t);
            report("8", "retention curve", Err(e), t);
        }
    }
    let t = Instant::now();
    report("9", "threshold loop", threshold_loop(), t);
    let t = Instant::now();
    report("10", "determinism", determinism(), t);
    println!("{failures} of 10 criteria failed");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
