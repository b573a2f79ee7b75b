// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

pub mod oracles;

use mrfbound_core::mrf::{numeric_labels, HyperEdge, Mrf};
use rand::seq::SliceRandom;
use rand::Rng;

/// Pairwise and triple potentials uniform in `[-cap, cap]` on random member sets.
pub fn random_mrf<R: Rng>(rng: &mut R, radices: &[usize], cap: f64) -> Mrf {
    let n = radices.len();
    let u = |rng: &mut R| if cap == 0.0 { 0.0 } else { rng.gen_range(-cap..=cap) };
    let vertex = radices.iter().map(|&r| (0..r).map(|_| u(rng)).collect()).collect();
    let mut edges = Vec::new();
    if n >= 2 {
        for _ in 0..rng.gen_range(1..=n) {
            let size = if n >= 3 && rng.gen_bool(0.5) { 3 } else { 2 };
            let ids: Vec<usize> = (0..n).collect();
            let mut members: Vec<usize> = ids.choose_multiple(rng, size).copied().collect();
            members.sort_unstable();
            let len: usize = members.iter().map(|&m| radices[m]).product();
            edges.push(HyperEdge::new(members, (0..len).map(|_| u(rng)).collect()));
        }
    }
    Mrf::new(radices.iter().map(|&r| numeric_labels(r)).collect(), vertex, edges).unwrap()
}

pub fn random_radices<R: Rng>(rng: &mut R, n_max: usize, k_max: usize) -> Vec<usize> {
    let n = rng.gen_range(1..=n_max);
    (0..n).map(|_| rng.gen_range(2..=k_max)).collect()
}

/// Values on the grid `2^{k/2}`, `k = 0..=8`.
pub fn grid_values<R: Rng>(rng: &mut R, radices: &[usize]) -> Vec<Vec<f64>> {
    radices.iter().map(|&r| (0..r).map(|_| 2f64.powf(rng.gen_range(0..=8) as f64 / 2.0)).collect()).collect()
}
