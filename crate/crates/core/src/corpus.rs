//! Seeded test-vector corpora.
//!
//! The mixture cycles through four shapes: signed indicators, geometric
//! decay, the two-level vectors `1_A + (1+ε)1_B` that extremize the
//! conservative-type ratios, and sparse uniform noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::vector::Vector;

pub const EPSILONS: [f64; 2] = [1e-3, 1e-1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub dim: usize,
    pub size: usize,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(dim: usize, size: usize, seed: u64) -> Self {
        Self { dim, size, seed }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[usize], k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = pool.choose_multiple(rng, k).copied().collect();
    v.sort_unstable();
    v
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// `1_A + (1+ε)1_B` for disjoint random `A`, `B` with `|A| ≤ |B|`; the
/// larger block is placed left or right of the smaller one with equal odds.
pub fn two_level(rng: &mut ChaCha8Rng, dim: usize, eps: f64) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    if dim < 2 {
        x[0] = 1.0;
        return x;
    }
    let cut = rng.gen_range(1..dim);
    let (lo, hi): (Vec<usize>, Vec<usize>) = ((0..cut).collect(), (cut..dim).collect());
    let b_right = rng.gen_bool(0.5);
    let (a_pool, b_pool) = if b_right { (lo, hi) } else { (hi, lo) };
    let kb = rng.gen_range(1..=b_pool.len());
    let ka = rng.gen_range(1..=kb.min(a_pool.len()));
    for i in random_subset(rng, &a_pool, ka) {
        x[i] = 1.0;
    }
    for i in random_subset(rng, &b_pool, kb) {
        x[i] = 1.0 + eps;
    }
    x
}

fn one(rng: &mut ChaCha8Rng, dim: usize, slot: usize) -> Vec<f64> {
    let all: Vec<usize> = (0..dim).collect();
    match slot % 4 {
        0 => {
            let k = rng.gen_range(1..=dim);
            let mut x = vec![0.0; dim];
            for i in random_subset(rng, &all, k) {
                x[i] = sign(rng);
            }
            x
        }
        1 => {
            let ratio = rng.gen_range(0.3..0.95);
            let mut order = all.clone();
            order.shuffle(rng);
            let mut x = vec![0.0; dim];
            let mut a = 1.0;
            for i in order {
                x[i] = sign(rng) * a;
                a *= ratio;
            }
            x
        }
        2 => two_level(rng, dim, EPSILONS[(slot / 4) % 2]),
        _ => {
            let mut x: Vec<f64> = (0..dim)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        rng.gen_range(-2.0..2.0)
                    }
                })
                .collect();
            if x.iter().all(|&v| v == 0.0) {
                x[rng.gen_range(0..dim)] = 1.0;
            }
            x
        }
    }
}

/// Deterministic corpus of nonzero vectors.
pub fn generate(spec: &CorpusSpec) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.size)
        .map(|slot| Vector::new(one(&mut rng, spec.dim, slot)).expect("finite entries"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_nonzero() {
        let a = generate(&CorpusSpec::new(7, 50, 11));
        let b = generate(&CorpusSpec::new(7, 50, 11));
        assert_eq!(a, b);
        assert!(a.iter().all(|x| !x.is_zero() && x.dim() == 7));
        assert_ne!(a, generate(&CorpusSpec::new(7, 50, 12)));
    }

    #[test]
    fn two_level_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = two_level(&mut rng, 8, 0.1);
            let a = x.iter().filter(|&&v| v == 1.0).count();
            let b = x.iter().filter(|&&v| v == 1.1).count();
            assert!(a >= 1 && a <= b);
        }
    }
}
