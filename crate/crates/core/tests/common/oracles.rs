// SPDX-License-Identifier: Apache-2.0

//! Brute-force references for the LP solver, single-item revenue and the
//! online stopping optimum.

use mrfbound_core::lp::{LpError, LpProblem, Relation};
use mrfbound_core::mechanisms::{optimal_rev, rev_i};
use mrfbound_core::mrf::{numeric_labels, Mrf};
use mrfbound_core::prophet::{optimal_online, ProphetInstance};
use mrfbound_core::valuation::{SetValuation, ValuationDistribution, ValuationKind};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rows `a x (<=, >=, =) b` plus `x >= 0`, as `(a, relation, b)`.
fn all_rows(p: &LpProblem) -> Vec<(Vec<f64>, Relation, f64)> {
    let n = p.num_vars();
    let mut rows: Vec<_> = p.constraints.iter().map(|c| (c.coeffs.clone(), c.relation, c.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, Relation::Ge, 0.0));
    }
    rows
}

fn feasible(rows: &[(Vec<f64>, Relation, f64)], x: &[f64], tol: f64) -> bool {
    rows.iter().all(|(a, rel, b)| {
        let ax: f64 = a.iter().zip(x).map(|(a, x)| a * x).sum();
        match rel {
            Relation::Le => ax <= b + tol,
            Relation::Ge => ax >= b - tol,
            Relation::Eq => (ax - b).abs() <= tol,
        }
    })
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Best objective over basic feasible solutions, `None` when there are none.
fn vertex_optimum(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    let rows = all_rows(p);
    let mut best: Option<f64> = None;
    for pick in combinations(rows.len(), n) {
        let a = DMatrix::from_fn(n, n, |r, c| rows[pick[r]].0[c]);
        let b = DVector::from_iterator(n, pick.iter().map(|&r| rows[r].2));
        let Some(x) = a.clone().lu().solve(&b) else { continue };
        if (&a * &x - &b).amax() > 1e-9 {
            continue;
        }
        let x: Vec<f64> = x.iter().copied().collect();
        if feasible(&rows, &x, 1e-9) {
            let obj: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(obj, |b: f64| b.max(obj)));
        }
    }
    best
}

fn random_lp(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.gen_range(1..=6);
    let mut p = LpProblem::new((0..n).map(|_| rng.gen_range(-1.0..2.0)).collect());
    // keeps the region bounded
    p.le(vec![1.0; n], rng.gen_range(1.0..5.0));
    for _ in 0..rng.gen_range(0..=4) {
        let a: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-2.0..2.0) }).collect();
        let relation = *[Relation::Le, Relation::Le, Relation::Ge, Relation::Eq].choose(rng).unwrap();
        let b = match relation {
            Relation::Le => rng.gen_range(-0.5..3.0),
            _ => rng.gen_range(-1.0..1.0),
        };
        p.add(a, relation, b);
    }
    p
}

/// `max_p p Pr[v >= p]` by scanning every support value as a price.
fn posted_price_oracle(points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(price, _)| price * points.iter().filter(|&&(v, _)| v >= price).map(|&(_, q)| q).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Best deterministic stopping rule found by trying every map from observed
/// prefixes to stop/continue.
fn policy_tree_optimum(probs: &[(Vec<usize>, f64)], arrival_values: &[Vec<f64>]) -> f64 {
    let n = arrival_values.len();
    // prefix of length k + 1 over binary supports, indexed by (k, bits)
    let offsets: Vec<usize> = (0..n).map(|k| (1usize << (k + 1)) - 2).collect();
    let nodes = (1usize << (n + 1)) - 2;
    let mut best = 0.0f64;
    for rule in 0u64..(1u64 << nodes) {
        let total: f64 = probs
            .iter()
            .map(|(s, p)| {
                let mut bits = 0usize;
                for k in 0..n {
                    bits |= s[k] << k;
                    if (rule >> (offsets[k] + bits)) & 1 == 1 {
                        return p * arrival_values[k][s[k]];
                    }
                }
                0.0
            })
            .sum();
        best = best.max(total);
    }
    best
}

/// Simplex optimum vs the best vertex on `count` feasible random LPs; infeasible
/// draws must be reported infeasible by both. Returns the worst relative gap.
pub fn lp_vs_vertices(count: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut solved, mut infeasible, mut worst) = (0, 0, 0.0f64);
    while solved < count {
        let p = random_lp(&mut rng);
        match (p.solve(), vertex_optimum(&p)) {
            (Ok(s), Some(v)) => {
                let gap = (s.objective - v).abs() / v.abs().max(1.0);
                if gap > 1e-7 || p.violation(&s.x) > 1e-7 {
                    return Err(format!("{p:?}: simplex {} vs vertices {v}", s.objective));
                }
                worst = worst.max(gap);
                solved += 1;
            }
            (Err(LpError::Infeasible { .. }), None) => infeasible += 1,
            (got, want) => return Err(format!("{p:?}: simplex {got:?}, vertex enumeration {want:?}")),
        }
    }
    if infeasible == 0 {
        return Err("no infeasible system was drawn".into());
    }
    Ok(worst)
}

/// LP optimum vs the best posted price on `count` single-item distributions,
/// cycling through the buyer classes. Returns the worst relative gap.
pub fn single_item_revenue(count: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [ValuationKind::Additive, ValuationKind::UnitDemand, ValuationKind::SubadditiveTable];
    let mut worst = 0.0f64;
    for t in 0..count {
        let k = rng.gen_range(1..=6);
        let potentials: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mrf = Mrf::independent(vec![numeric_labels(k)], vec![potentials]).unwrap();
        let values = super::grid_values(&mut rng, &[k]);
        let g = match kinds[t % 3] {
            ValuationKind::Additive => SetValuation::additive(values.clone()).unwrap(),
            ValuationKind::UnitDemand => SetValuation::unit_demand(values.clone()).unwrap(),
            ValuationKind::SubadditiveTable => {
                SetValuation::tabulate(&[k], |typed| typed[0].map_or(0.0, |w| values[0][w])).unwrap()
            }
        };
        let joint = mrf.joint_table().unwrap();
        let points: Vec<(f64, f64)> = values[0].iter().copied().zip(joint.marginal(0).unwrap()).collect();
        let d = ValuationDistribution::new(joint, g).unwrap();
        let lp = optimal_rev(&d).map_err(|e| e.to_string())?.revenue;
        let single = rev_i(&d, 0).revenue;
        let oracle = posted_price_oracle(&points);
        let gap = (lp - single).abs() / single.max(1.0);
        if gap > 1e-9 || (single - oracle).abs() > 1e-12 * oracle.max(1.0) {
            return Err(format!("instance {t}: LP {lp}, rev_i {single}, price scan {oracle}"));
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// Online optimum vs exhaustive policy search on `count` binary instances
/// with up to three arrivals. Returns the worst relative gap.
pub fn online_vs_policy_tree(count: usize, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for t in 0..count {
        let n = rng.gen_range(1..=3);
        let mrf = super::random_mrf(&mut rng, &vec![2; n], 1.5);
        let values = super::grid_values(&mut rng, &vec![2; n]);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let inst = ProphetInstance::new(mrf.clone(), values.clone(), order.clone()).unwrap();

        let mut probs = Vec::new();
        mrf.joint_table().unwrap().for_each(|s, p| probs.push((order.iter().map(|&i| s[i]).collect::<Vec<_>>(), p)));
        let arrival_values: Vec<Vec<f64>> = order.iter().map(|&i| values[i].clone()).collect();

        let dp = optimal_online(&inst).map_err(|e| e.to_string())?;
        let oracle = policy_tree_optimum(&probs, &arrival_values);
        let gap = (dp - oracle).abs() / oracle.max(1.0);
        if gap > 1e-12 {
            return Err(format!("instance {t}: DP {dp} vs policy search {oracle}"));
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}
