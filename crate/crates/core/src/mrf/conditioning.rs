// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::JointTable;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningOptions {
    /// Enumerate every `E_{-i}` when the rest of the support has at most this many outcomes.
    pub exhaustive_limit: usize,
    /// Random subsets drawn per vertex otherwise (singletons are always included).
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for ConditioningOptions {
    fn default() -> Self {
        Self { exhaustive_limit: 12, samples: 10_000, seed: 0, rel_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningReport {
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub pass: bool,
}

/// Checks `e^{-4 delta} <= P(E_i, E_-i) / (P(E_i) P(E_-i)) <= e^{4 delta}` over
/// event pairs with positive probability.
pub fn check_conditioning_bounds(joint: &JointTable, delta: f64, opts: &ConditioningOptions) -> ConditioningReport {
    let radices = joint.radices().to_vec();
    let n = radices.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_ratio: f64 = 1.0;
    let mut min_ratio: f64 = 1.0;
    let mut pairs = 0usize;
    let mut exhaustive = true;

    for i in 0..n {
        let k = radices[i];
        let rest: usize = joint.len() / k;
        if rest == 0 {
            continue;
        }
        // rows: state of t_i; columns: flat index of t_{-i}
        let mut table = vec![vec![0.0; rest]; k];
        let mut rest_digits = Vec::with_capacity(n - 1);
        joint.for_each(|s, p| {
            rest_digits.clear();
            rest_digits.extend(s.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &d)| d));
            let mut b = 0;
            for (j, &d) in rest_digits.iter().enumerate() {
                let r = if j < i { radices[j] } else { radices[j + 1] };
                b = b * r + d;
            }
            table[s[i]][b] += p;
        });
        let marg: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
        let own_events: Vec<(u64, f64)> = (1u64..(1u64 << k))
            .map(|mask| (mask, (0..k).filter(|a| mask >> a & 1 == 1).map(|a| marg[a]).sum::<f64>()))
            .filter(|(_, p)| *p > 0.0)
            .collect();

        let mut visit = |members: &mut dyn Iterator<Item = usize>| {
            let mut col = vec![0.0; k];
            for b in members {
                for a in 0..k {
                    col[a] += table[a][b];
                }
            }
            let p_rest: f64 = col.iter().sum();
            if p_rest <= 0.0 {
                return;
            }
            for &(mask, p_own) in &own_events {
                let both: f64 = (0..k).filter(|a| mask >> a & 1 == 1).map(|a| col[a]).sum();
                let ratio = both / (p_own * p_rest);
                max_ratio = max_ratio.max(ratio);
                min_ratio = min_ratio.min(ratio);
                pairs += 1;
            }
        };

        if rest <= opts.exhaustive_limit {
            for mask in 1u64..(1u64 << rest) {
                visit(&mut (0..rest).filter(|b| mask >> b & 1 == 1));
            }
        } else {
            exhaustive = false;
            // Ratios are weighted averages over singletons, so the singleton
            // events carry the extremes; random subsets exercise the rest.
            for b in 0..rest {
                visit(&mut std::iter::once(b));
            }
            let mut chosen = vec![false; rest];
            for _ in 0..opts.samples {
                chosen.iter_mut().for_each(|c| *c = rng.gen_bool(0.5));
                visit(&mut (0..rest).filter(|&b| chosen[b]));
            }
        }
    }

    let lower = (-4.0 * delta).exp();
    let upper = (4.0 * delta).exp();
    let pass = min_ratio >= lower * (1.0 - opts.rel_tol) && max_ratio <= upper * (1.0 + opts.rel_tol);
    ConditioningReport { max_ratio, min_ratio, lower, upper, pairs_checked: pairs, exhaustive, pass }
}
