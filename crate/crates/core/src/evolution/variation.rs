use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{EvolutionConfig, EvolutionError, Individual};
use crate::genome::Genome;

/// Swaps everything from a uniformly drawn cut point `k ∈ [1, L-1]`
/// onwards between the parents; weights and mask travel together.
pub fn single_point_crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rng: &mut R,
) -> Result<(Genome, Genome), EvolutionError> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Ok((a.clone(), b.clone()));
    }
    let k = rng.gen_range(1..a.len());
    single_point_crossover_at(a, b, k)
}

pub fn single_point_crossover_at(
    a: &Genome,
    b: &Genome,
    cut: usize,
) -> Result<(Genome, Genome), EvolutionError> {
    check_lengths(a, b)?;
    let cut = cut.min(a.len());
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    {
        let (w1, m1) = c1.parts_mut();
        let (w2, m2) = c2.parts_mut();
        w1[cut..].swap_with_slice(&mut w2[cut..]);
        m1[cut..].swap_with_slice(&mut m2[cut..]);
    }
    Ok((c1, c2))
}

fn check_lengths(a: &Genome, b: &Genome) -> Result<(), EvolutionError> {
    if a.len() != b.len() || a.topology() != b.topology() {
        return Err(EvolutionError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Gaussian perturbation of active genes, then possibly one structural
/// toggle (add or remove a uniformly chosen connection).
pub fn gaussian_mutate<R: Rng + ?Sized>(
    genome: &Genome,
    rng: &mut R,
    config: &EvolutionConfig,
) -> Genome {
    let mut child = genome.clone();
    let noise = Normal::new(0.0, config.gaussian_sigma).expect("sigma validated by config");
    {
        let (weights, mask) = child.parts_mut();
        for (w, active) in weights.iter_mut().zip(mask.iter()) {
            if *active && rng.gen_bool(config.per_gene_prob) {
                *w += noise.sample(rng);
            }
        }
    }
    if !child.is_empty() && rng.gen_bool(config.structural_prob) {
        let i = rng.gen_range(0..child.len());
        toggle_connection(&mut child, i, rng);
    }
    child
}

/// Flips one mask bit. A newly enabled connection gets a fresh
/// standard-normal weight.
pub fn toggle_connection<R: Rng + ?Sized>(genome: &mut Genome, index: usize, rng: &mut R) {
    let now_active = !genome.mask()[index];
    genome.mask_mut()[index] = now_active;
    if now_active {
        genome.weights_mut()[index] = rng.sample(StandardNormal);
    }
}

/// Picks two individuals at random and returns the index of the one with
/// the lower rank, then the larger crowding distance, then lower index.
pub fn binary_tournament<R: Rng + ?Sized>(pop: &[Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if better(&pop[a], a, &pop[b], b) {
        a
    } else {
        b
    }
}

fn better(x: &Individual, xi: usize, y: &Individual, yi: usize) -> bool {
    if x.rank != y.rank {
        return x.rank < y.rank;
    }
    if x.crowding != y.crowding {
        return x.crowding > y.crowding;
    }
    xi <= yi
}
