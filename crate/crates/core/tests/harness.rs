use std::fs;

use wp_neuroevo::environments::evaluate;
use wp_neuroevo::harness::{read_result, run_continual, write_run, RunConfig, Technique};
use wp_neuroevo::{EvolutionConfig, TaskId};

fn tiny(gens: usize) -> RunConfig {
    RunConfig {
        generations_per_task: gens,
        evolution: EvolutionConfig {
            population_size: 4,
            master_seed: 21,
            ..EvolutionConfig::default()
        },
        ..RunConfig::default()
    }
}

#[test]
fn four_tasks_forty_generations_give_160_rows() {
    let result = run_continual(&tiny(40)).unwrap();
    assert_eq!(result.stats.len(), 160);
    assert_eq!(result.retention.len(), 4);
    for (t, chunk) in result.stats.chunks(40).enumerate() {
        assert!(chunk.iter().all(|s| s.task_index == t));
    }
    assert_eq!(
        result.tasks,
        vec![
            TaskId::CartPole,
            TaskId::Pendulum,
            TaskId::MountainCar,
            TaskId::AgentOrientation
        ]
    );
}

#[test]
fn retention_curve_is_well_formed() {
    for technique in Technique::ALL {
        let config = RunConfig {
            technique,
            ..tiny(2)
        };
        let r = run_continual(&config).unwrap();
        assert_eq!(r.retention.len(), config.task_sequence.len());
        for (i, rec) in r.retention.iter().enumerate() {
            assert_eq!(rec.after_task_index, i);
            assert_eq!(rec.task_id, config.task_sequence[i]);
            assert!((0.0..=1.0).contains(&rec.task1_fitness));
        }
    }
}

#[test]
fn persisted_files_are_byte_identical_for_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tiny(3);
    for name in ["a", "b"] {
        write_run(
            &tmp.path().join(name),
            &run_continual(&config).unwrap(),
            Some(&config),
        )
        .unwrap();
    }
    for file in [
        "stats.csv",
        "retention.csv",
        "final.csv",
        "result.json",
        "best_genome.txt",
        "config.conf",
    ] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(file)).unwrap(),
            fs::read(tmp.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
    let other = RunConfig {
        evolution: EvolutionConfig {
            master_seed: 22,
            ..config.evolution.clone()
        },
        ..config
    };
    assert_ne!(
        run_continual(&other).unwrap().best_genome,
        read_result(&tmp.path().join("a/result.json"))
            .unwrap()
            .best_genome
    );
}

#[test]
fn final_fitness_is_rederivable_from_saved_genome_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tiny(2);
    write_run(tmp.path(), &run_continual(&config).unwrap(), Some(&config)).unwrap();
    let saved = read_result(&tmp.path().join("result.json")).unwrap();
    let reloaded = RunConfig::load(&tmp.path().join("config.conf")).unwrap();
    assert_eq!(reloaded, config);
    let genome = fs::read_to_string(tmp.path().join("best_genome.txt"))
        .unwrap()
        .parse()
        .unwrap();
    for (i, task) in saved.tasks.iter().enumerate() {
        let spec = reloaded
            .tasks
            .get(*task)
            .unwrap()
            .with_seed_base(reloaded.seed());
        assert_eq!(
            evaluate(&genome, &spec, reloaded.evolution.topology),
            saved.final_fitness[i]
        );
    }
}

#[test]
fn paired_seeds_share_generation_zero_parents() {
    // Before the first boundary there is no reference, so Modularity and
    // WP+Modularity only differ if their initial populations do.
    let base = RunConfig {
        wp: wp_neuroevo::WpConfig {
            p: 1.0,
            ..Default::default()
        },
        ..tiny(1)
    };
    let a = run_continual(&RunConfig {
        technique: Technique::Modularity,
        ..base.clone()
    })
    .unwrap();
    let b = run_continual(&RunConfig {
        technique: Technique::WpModularity,
        ..base
    })
    .unwrap();
    assert_eq!(a.stats[0], b.stats[0]);
}

#[test]
fn single_task_sequence_degenerates_to_single_task_evolution() {
    let config = RunConfig {
        task_sequence: vec![TaskId::MountainCar],
        ..tiny(3)
    };
    let r = run_continual(&config).unwrap();
    assert_eq!(r.stats.len(), 3);
    assert_eq!(r.retention.len(), 1);
    assert!(r.stats.iter().all(|s| s.mean_revised == s.mean_task_fit));
}
