//! Tree-indexed Markov chain sampler.
//!
//! Sample `i` is drawn from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`, so samples are independent of each other and of the order
//! in which they are generated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::model::{single_step_matrix, two_step_matrix, ModelParams, TransitionMatrix2};
use crate::oracle::ball::{FiniteBall, RootDegree};

/// Generator identity reported alongside sampled output.
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng(seed_from_u64(seed), stream = sample index)";

#[derive(Debug, Clone)]
pub struct TreeSamples {
    /// Half-tree ball the chain lives on.
    pub ball: FiniteBall,
    /// One breadth-first spin vector per sample.
    pub samples: Vec<Vec<u8>>,
    /// Edge matrices: from even levels, then from odd levels.
    pub even_step: TransitionMatrix2,
    pub odd_step: TransitionMatrix2,
    pub root_law: [f64; 2],
}

/// Draws `count` configurations of the chain on a depth-`depth` half-tree.
///
/// The root follows the stationary law of `P(z1)·P(z2)`; an edge leaving an
/// even level uses `P(z1)`, one leaving an odd level uses `P(z2)`.
pub fn sample_tree_chain(
    params: &ModelParams,
    z1: f64,
    z2: f64,
    depth: u32,
    count: usize,
    seed: u64,
) -> Result<TreeSamples> {
    if depth < 1 || count < 1 {
        return domain(format!(
            "need depth >= 1 and count >= 1, got {depth}, {count}"
        ));
    }
    let ball = FiniteBall::new(params.k(), depth, RootDegree::Half)?;
    let even_step = single_step_matrix(params, z1)?;
    let odd_step = single_step_matrix(params, z2)?;
    let root_law = two_step_matrix(params, z1, z2)?
        .stationary()
        .ok_or_else(|| {
            crate::error::HcError::Domain("two-step chain has no unique stationary law".into())
        })?;

    let levels: Vec<u32> = (0..ball.vertex_count()).map(|v| ball.level_of(v)).collect();
    let samples = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut spins = vec![0u8; ball.vertex_count()];
            spins[0] = u8::from(rng.gen::<f64>() < root_law[1]);
            for v in 1..spins.len() {
                let p = ball.parent(v).expect("non-root vertex has a parent");
                let m = if levels[p].is_multiple_of(2) {
                    &even_step
                } else {
                    &odd_step
                };
                let up = m.row(spins[p])[1];
                spins[v] = u8::from(rng.gen::<f64>() < up);
            }
            spins
        })
        .collect();

    Ok(TreeSamples {
        ball,
        samples,
        even_step,
        odd_step,
        root_law,
    })
}

/// Occupied and total counts of children whose parent is free, split by the
/// parity of the parent's level: `[(occupied, trials) from even, from odd]`.
pub fn free_parent_child_counts(s: &TreeSamples) -> [(u64, u64); 2] {
    let mut out = [(0u64, 0u64); 2];
    for spins in &s.samples {
        for v in 1..spins.len() {
            let p = s.ball.parent(v).expect("non-root vertex has a parent");
            if spins[p] == 0 {
                let slot = &mut out[(s.ball.level_of(p) % 2) as usize];
                slot.0 += spins[v] as u64;
                slot.1 += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ball::Configuration;

    #[test]
    fn deterministic_per_seed() {
        let params = ModelParams::new(2, 5.0).unwrap();
        let a = sample_tree_chain(&params, 0.1, 0.5, 3, 50, 7).unwrap();
        let b = sample_tree_chain(&params, 0.1, 0.5, 3, 50, 7).unwrap();
        let c = sample_tree_chain(&params, 0.1, 0.5, 3, 50, 8).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn occupied_parent_forces_free_children() {
        let params = ModelParams::new(3, 2.0).unwrap();
        let s = sample_tree_chain(&params, 0.2, 0.3, 3, 500, 1).unwrap();
        for spins in &s.samples {
            assert!(Configuration {
                spins: spins.clone()
            }
            .is_admissible(&s.ball));
        }
    }

    #[test]
    fn rejects_empty_requests() {
        let params = ModelParams::new(2, 1.0).unwrap();
        assert!(sample_tree_chain(&params, 0.4, 0.4, 0, 1, 0).is_err());
        assert!(sample_tree_chain(&params, 0.4, 0.4, 1, 0, 0).is_err());
    }
}
