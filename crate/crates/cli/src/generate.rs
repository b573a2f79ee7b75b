// SPDX-License-Identifier: Apache-2.0

//! Seeded random instances.

use anyhow::{bail, Result};
use mrfbound_core::format::Instance;
use mrfbound_core::mrf::{numeric_labels, HyperEdge, Mrf};
use mrfbound_core::valuation::{SetValuation, ValuationKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;

pub const MAX_ATTEMPTS: usize = 100;

/// Singleton values are `2^{k/2}` for `k = 0..=8`.
pub fn value_grid() -> Vec<f64> {
    (0..=8).map(|k| 2f64.powf(k as f64 / 2.0)).collect()
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rng: &mut ChaCha8Rng, cap: f64) -> f64 {
    if cap == 0.0 {
        0.0
    } else {
        rng.gen_range(-cap..=cap)
    }
}

/// Random MRF: potentials uniform in `[-cap, cap]`, up to `n` hyperedges of size 2 or 3.
pub fn random_mrf(rng: &mut ChaCha8Rng, cfg: &ExperimentConfig) -> Result<Mrf> {
    let n = rng.gen_range(cfg.n.lo..=cfg.n.hi);
    let radices: Vec<usize> = (0..n).map(|_| rng.gen_range(cfg.support.lo..=cfg.support.hi)).collect();
    random_mrf_with(rng, &radices, cfg.potential_cap)
}

pub fn random_mrf_with(rng: &mut ChaCha8Rng, radices: &[usize], cap: f64) -> Result<Mrf> {
    let n = radices.len();
    let supports = radices.iter().map(|&r| numeric_labels(r)).collect();
    let vertex = radices.iter().map(|&r| (0..r).map(|_| uniform(rng, cap)).collect()).collect();
    let mut edges = Vec::new();
    if n >= 2 {
        let count = rng.gen_range(1..=n);
        let ids: Vec<usize> = (0..n).collect();
        for _ in 0..count {
            let size = if n >= 3 && rng.gen_bool(0.5) { 3 } else { 2 };
            let mut members: Vec<usize> = ids.choose_multiple(rng, size).copied().collect();
            members.sort_unstable();
            let entries: usize = members.iter().map(|&m| radices[m]).product();
            let potential = (0..entries).map(|_| uniform(rng, cap)).collect();
            edges.push(HyperEdge::new(members, potential));
        }
    }
    Ok(Mrf::new(supports, vertex, edges)?)
}

fn random_singletons(rng: &mut ChaCha8Rng, radices: &[usize]) -> Vec<Vec<f64>> {
    let grid = value_grid();
    radices.iter().map(|&r| (0..r).map(|_| *grid.choose(rng).unwrap()).collect()).collect()
}

/// `g(S) = min(sum_{i in S} a_i, c max_{i in S} a_i)` with `c` uniform in `[1, n]`.
fn random_subadditive(rng: &mut ChaCha8Rng, radices: &[usize]) -> Result<SetValuation> {
    for _ in 0..MAX_ATTEMPTS {
        let a = random_singletons(rng, radices);
        let c = rng.gen_range(1.0..=radices.len().max(1) as f64);
        let g = SetValuation::tabulate(radices, |typed| {
            let vals = typed.iter().enumerate().filter_map(|(i, w)| w.map(|w| a[i][w]));
            let (sum, max) = vals.fold((0.0, 0.0f64), |(s, m), v| (s + v, m.max(v)));
            sum.min(c * max)
        })?;
        if g.validate_class().pass {
            return Ok(g);
        }
    }
    bail!("no subadditive table passed validation in {MAX_ATTEMPTS} attempts")
}

pub fn random_valuation(rng: &mut ChaCha8Rng, kind: ValuationKind, radices: &[usize]) -> Result<SetValuation> {
    Ok(match kind {
        ValuationKind::Additive => SetValuation::additive(random_singletons(rng, radices))?,
        ValuationKind::UnitDemand => SetValuation::unit_demand(random_singletons(rng, radices))?,
        ValuationKind::SubadditiveTable => random_subadditive(rng, radices)?,
    })
}

/// Instance with an MRF and a valuation of the configured class.
pub fn generate_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let mut rng = rng_for(seed);
    let mrf = random_mrf(&mut rng, cfg)?;
    let valuation = random_valuation(&mut rng, cfg.class, mrf.radices())?;
    Ok(Instance { id: None, seed: Some(seed), valuation: Some(valuation), ..Instance::new(mrf) })
}

/// Instance whose additive singletons are the values `g_i` and with a random arrival order.
pub fn generate_prophet_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let mut rng = rng_for(seed);
    let mrf = random_mrf(&mut rng, cfg)?;
    let valuation = SetValuation::additive(random_singletons(&mut rng, mrf.radices()))?;
    let mut order: Vec<usize> = (0..mrf.len()).collect();
    order.shuffle(&mut rng);
    Ok(Instance { id: None, seed: Some(seed), valuation: Some(valuation), order: Some(order), ..Instance::new(mrf) })
}

/// Binary MRF whose total activity `sum_i Pr[t_i = 1]` is at most 1.
///
/// A common penalty on the active state is raised by bisection until the
/// total drops to a target drawn from `[0.5, 1]`; adding the same constant
/// to every active potential keeps every edge potential and hence `delta`.
pub fn generate_ocrs_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(cfg.n.lo..=cfg.n.hi);
    let base = random_mrf_with(&mut rng, &vec![2; n], cfg.potential_cap)?;
    let target: f64 = rng.gen_range(0.5..=1.0);
    let shifted = |c: f64| -> Result<Mrf> {
        let vertex = base.vertex_potentials().iter().map(|p| vec![p[0], p[1] - c]).collect();
        Ok(Mrf::new(base.supports().to_vec(), vertex, base.edges().to_vec())?)
    };
    let activity = |m: &Mrf| -> Result<f64> {
        let joint = m.joint_table()?;
        Ok((0..m.len()).map(|i| joint.marginal(i).map(|p| p[1])).sum::<Result<f64, _>>()?)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if activity(&shifted(lo)?)? > target {
        while activity(&shifted(hi)?)? > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if activity(&shifted(mid)?)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        hi = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    Ok(Instance { id: None, seed: Some(seed), order: Some(order), ..Instance::new(shifted(hi)?) })
}
