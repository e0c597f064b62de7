//! Non-dominated sorting and crowding-distance survivor selection.
//! All objectives are maximized.

use std::cmp::Ordering;

use super::{EvolutionError, Individual};

/// `a` dominates `b` when it is no worse in every objective and strictly
/// better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, EvolutionError> {
    if a.len() != b.len() {
        return Err(EvolutionError::ArityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return Ok(false);
        }
        if x > y {
            strictly = true;
        }
    }
    Ok(strictly)
}

/// Deb's fast non-dominated sort over objective vectors. Returns fronts
/// of indices, front 0 first; members of each front are in index order.
pub fn fast_non_dominated_sort(objectives: &[Vec<f64>]) -> Result<Vec<Vec<usize>>, EvolutionError> {
    let n = objectives.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&objectives[p], &objectives[q])? {
                dominated_by[p].push(q);
                domination_count[q] += 1;
            } else if dominates(&objectives[q], &objectives[p])? {
                dominated_by[q].push(p);
                domination_count[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|i| domination_count[*i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance of each member of `front` (indices into
/// `objectives`), returned in the same order as `front`.
pub fn crowding_distance(objectives: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let len = front.len();
    if len <= 2 {
        return vec![f64::INFINITY; len];
    }
    let arity = objectives[front[0]].len();
    let mut distance = vec![0.0; len];
    let mut order: Vec<usize> = (0..len).collect();
    for m in 0..arity {
        let value = |k: usize| objectives[front[k]][m];
        order.sort_by(|a, b| {
            value(*a)
                .partial_cmp(&value(*b))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(b))
        });
        let lo = value(order[0]);
        let hi = value(order[len - 1]);
        distance[order[0]] = f64::INFINITY;
        distance[order[len - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..len - 1 {
            let gap = value(order[w + 1]) - value(order[w - 1]);
            distance[order[w]] += gap / range;
        }
    }
    distance
}

/// Writes rank and crowding distance into every individual.
pub fn assign_rank_and_crowding(pop: &mut [Individual]) -> Result<Vec<Vec<usize>>, EvolutionError> {
    let objectives: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_non_dominated_sort(&objectives)?;
    for (rank, front) in fronts.iter().enumerate() {
        let crowding = crowding_distance(&objectives, front);
        for (&idx, c) in front.iter().zip(crowding) {
            pop[idx].rank = rank;
            pop[idx].crowding = c;
        }
    }
    Ok(fronts)
}

/// Keeps `mu` individuals: whole fronts in rank order, then the last
/// admitted front by descending crowding distance (index breaks ties).
/// Survivors carry the rank and crowding computed over `candidates`.
pub fn nsga2_select(
    mut candidates: Vec<Individual>,
    mu: usize,
) -> Result<Vec<Individual>, EvolutionError> {
    if candidates.len() < mu {
        return Err(EvolutionError::NotEnoughCandidates {
            needed: mu,
            found: candidates.len(),
        });
    }
    let fronts = assign_rank_and_crowding(&mut candidates)?;
    let mut chosen: Vec<usize> = Vec::with_capacity(mu);
    for front in fronts {
        let room = mu - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend(front);
        } else {
            let mut last = front;
            last.sort_by(|a, b| {
                candidates[*b]
                    .crowding
                    .partial_cmp(&candidates[*a].crowding)
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(b))
            });
            chosen.extend(last.into_iter().take(room));
        }
    }
    chosen.sort_unstable();
    let mut keep = vec![false; candidates.len()];
    for i in chosen {
        keep[i] = true;
    }
    Ok(candidates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(c, _)| c)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{Genome, Topology};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ind(objectives: Vec<f64>) -> Individual {
        Individual::new(
            Genome::empty(Topology::standard()),
            objectives[0],
            objectives[0],
            objectives,
        )
    }

    #[test]
    fn dominance_cases() {
        assert!(dominates(&[1.0, -5.0], &[0.9, -7.0]).unwrap());
        assert!(!dominates(&[1.0, -7.0], &[0.9, -5.0]).unwrap());
        assert!(!dominates(&[0.9, -5.0], &[1.0, -7.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn staircase_is_one_front() {
        let pts = vec![
            vec![1.0, 4.0],
            vec![2.0, 3.0],
            vec![3.0, 2.0],
            vec![4.0, 1.0],
        ];
        assert_eq!(
            fast_non_dominated_sort(&pts).unwrap(),
            vec![vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn chain_is_singleton_fronts() {
        let pts = vec![vec![1.0, 1.0], vec![3.0, 3.0], vec![2.0, 2.0]];
        assert_eq!(
            fast_non_dominated_sort(&pts).unwrap(),
            vec![vec![1], vec![2], vec![0]]
        );
    }

    /// Peels fronts by checking every pair against the remaining set.
    fn brute_force_fronts(pts: &[Vec<f64>]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..pts.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| dominates(&pts[j], &pts[i]).unwrap())
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn matches_brute_force_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> = (0..50)
                .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                .collect();
            assert_eq!(
                fast_non_dominated_sort(&pts).unwrap(),
                brute_force_fronts(&pts)
            );
        }
    }

    #[test]
    fn crowding_small_fronts_are_infinite() {
        let pts = vec![vec![1.0], vec![2.0]];
        assert_eq!(crowding_distance(&pts, &[0, 1]), vec![f64::INFINITY; 2]);
        assert_eq!(crowding_distance(&pts, &[1]), vec![f64::INFINITY]);
    }

    #[test]
    fn crowding_evenly_spaced_middle_is_one() {
        // one varying objective, one constant: range 2, neighbour gap 2
        let pts = vec![vec![0.0, 5.0], vec![1.0, 5.0], vec![2.0, 5.0]];
        let d = crowding_distance(&pts, &[0, 1, 2]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_eq!(d[1], 1.0);
    }

    #[test]
    fn crowding_duplicates_are_finite() {
        let pts = vec![vec![1.0, 1.0]; 5];
        let d = crowding_distance(&pts, &[0, 1, 2, 3, 4]);
        assert_eq!(d.iter().filter(|x| x.is_infinite()).count(), 2);
        assert!(d[1..4].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn select_identical_is_first_mu_by_index() {
        let cands: Vec<Individual> = (0..10).map(|_| ind(vec![0.5])).collect();
        let mut tagged = cands.clone();
        for (i, c) in tagged.iter_mut().enumerate() {
            c.task_fitness = i as f64;
        }
        let out = nsga2_select(tagged, 4).unwrap();
        let idx: Vec<f64> = out.iter().map(|c| c.task_fitness).collect();
        // boundary members get infinite crowding, then lowest indices
        assert_eq!(idx, vec![0.0, 1.0, 2.0, 9.0]);
        assert!(nsga2_select(cands, 11).is_err());
    }

    #[test]
    fn single_objective_select_is_top_mu() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vals: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..1.0)).collect();
        let cands: Vec<Individual> = vals.iter().map(|v| ind(vec![*v])).collect();
        let mut got: Vec<f64> = nsga2_select(cands, 100)
            .unwrap()
            .iter()
            .map(|c| c.objectives[0])
            .collect();
        let mut want = vals.clone();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        want.truncate(100);
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn oversized_first_front_is_cut_by_crowding() {
        // 150 points on a line x + y = 1 (front 0), 50 dominated points
        let mut cands = Vec::new();
        for k in 0..150 {
            let x = k as f64 / 149.0;
            cands.push(ind(vec![x, 1.0 - x]));
        }
        for k in 0..50 {
            let x = k as f64 / 49.0 * 0.5;
            cands.push(ind(vec![x, 0.4 - x]));
        }
        let out = nsga2_select(cands.clone(), 100).unwrap();
        assert_eq!(out.len(), 100);
        assert!(out
            .iter()
            .all(|c| (c.objectives[0] + c.objectives[1] - 1.0).abs() < 1e-12));
        assert!(out.iter().any(|c| c.objectives[0] == 0.0));
        assert!(out.iter().any(|c| c.objectives[0] == 1.0));
    }
}
