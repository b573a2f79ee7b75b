// SPDX-License-Identifier: Apache-2.0

//! Online selection of one value from an MRF-correlated sequence.
//!
//! Values arrive in a fixed order, `X_i = g_i(t_i)`. Everything is evaluated
//! exactly over the joint table.

use crate::error::{Error, Result};
use crate::mrf::{build_path_mrf, max_weighted_degree, JointTable, MarkovChain, Mrf, PathTarget, DEFAULT_SUPPORT_CAP};
use crate::report::BoundReport;

/// Largest joint support on which [`optimal_online`] runs the prefix program.
pub const PREFIX_DP_CAP: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProphetInstance {
    mrf: Mrf,
    values: Vec<Vec<f64>>,
    order: Vec<usize>,
    /// Joint over arrival positions, not vertex ids.
    joint: JointTable,
}

impl ProphetInstance {
    pub fn new(mrf: Mrf, values: Vec<Vec<f64>>, order: Vec<usize>) -> Result<Self> {
        let n = mrf.len();
        if values.len() != n {
            return Err(Error::InvalidModel(format!("{} value maps for {n} vertices", values.len())));
        }
        for (i, g) in values.iter().enumerate() {
            if g.len() != mrf.radices()[i] {
                return Err(Error::InvalidModel(format!("value map {i} has {} entries", g.len())));
            }
            if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidModel(format!("value map {i} has a negative or non-finite entry")));
            }
        }
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidModel("arrival order is not a permutation".into()));
        }
        let joint = mrf.joint_table_with_cap(DEFAULT_SUPPORT_CAP)?.permuted(&order)?;
        Ok(Self { mrf, values, order, joint })
    }

    /// Items arrive in vertex order.
    pub fn in_order(mrf: Mrf, values: Vec<Vec<f64>>) -> Result<Self> {
        let order = (0..mrf.len()).collect();
        Self::new(mrf, values, order)
    }

    pub fn mrf(&self) -> &Mrf {
        &self.mrf
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Joint table indexed by arrival position.
    pub fn arrival_joint(&self) -> &JointTable {
        &self.joint
    }

    /// Value of the `k`-th arrival in state `w`.
    pub fn arrival_value(&self, k: usize, w: usize) -> f64 {
        self.values[self.order[k]][w]
    }

    pub fn delta(&self) -> f64 {
        max_weighted_degree(&self.mrf).delta
    }
}

/// Draw a level, then accept the first arrival with `X >= tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolicy {
    levels: Vec<(f64, f64)>,
}

impl ThresholdPolicy {
    pub fn new(levels: Vec<(f64, f64)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidModel("policy without levels".into()));
        }
        if levels.iter().any(|&(t, w)| t.is_nan() || w.is_nan() || t < 0.0 || w < 0.0) {
            return Err(Error::InvalidModel("thresholds and weights must be nonnegative".into()));
        }
        let total: f64 = levels.iter().map(|l| l.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("level weights sum to {total}")));
        }
        Ok(Self { levels })
    }

    pub fn single(threshold: f64) -> Result<Self> {
        Self::new(vec![(threshold, 1.0)])
    }

    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }
}

pub fn expected_max(inst: &ProphetInstance) -> f64 {
    inst.joint.expectation(|s| s.iter().enumerate().map(|(k, &w)| inst.arrival_value(k, w)).fold(0.0, f64::max))
}

/// Expected value of the first arrival meeting `tau`, or 0 if none does.
pub fn evaluate_threshold(inst: &ProphetInstance, tau: f64) -> f64 {
    inst.joint.expectation(|s| {
        s.iter().enumerate().map(|(k, &w)| inst.arrival_value(k, w)).find(|&x| x >= tau).unwrap_or(0.0)
    })
}

pub fn evaluate_policy(inst: &ProphetInstance, policy: &ThresholdPolicy) -> f64 {
    policy.levels.iter().map(|&(tau, w)| if w > 0.0 { w * evaluate_threshold(inst, tau) } else { 0.0 }).sum()
}

/// Number of geometric levels above the mean: `ceil(4 delta + 1)`.
pub fn level_count(delta: f64) -> usize {
    (4.0 * delta + 1.0).ceil() as usize
}

/// Thresholds `e^z E[max]` for `z = -1, 0, ..., K`, equally likely.
pub fn level_policy(inst: &ProphetInstance, delta: f64) -> Result<ThresholdPolicy> {
    let opt = expected_max(inst);
    if opt.is_nan() || opt <= 0.0 {
        return Err(Error::ZeroOpt);
    }
    let k = level_count(delta);
    let w = 1.0 / (k + 2) as f64;
    ThresholdPolicy::new((-1..=k as i64).map(|z| ((z as f64).exp() * opt, w)).collect())
}

/// `E[ALG] (20 delta + 15) >= E[max]` for [`level_policy`].
pub fn check_level_policy(inst: &ProphetInstance, delta: f64) -> Result<BoundReport> {
    let policy = level_policy(inst, delta)?;
    let alg = evaluate_policy(inst, &policy);
    Ok(BoundReport::le(
        "prophet_threshold",
        expected_max(inst),
        (20.0 * delta + 15.0) * alg,
        format!("levels={} alg={alg}", policy.levels.len()),
    ))
}

/// Best expected reward of any stopping rule that sees the states so far.
///
/// Uses backward induction over observed prefixes when the joint has at most
/// [`PREFIX_DP_CAP`] outcomes and the per-state chain program on in-order
/// paths otherwise.
pub fn optimal_online(inst: &ProphetInstance) -> Result<f64> {
    if inst.joint.len() <= PREFIX_DP_CAP {
        return Ok(optimal_online_prefix(inst));
    }
    if inst.mrf.is_path() && inst.order.iter().enumerate().all(|(k, &i)| k == i) {
        return optimal_online_chain(inst);
    }
    Err(Error::SupportTooLarge { size: inst.joint.len() as u128, cap: PREFIX_DP_CAP })
}

/// Prefix program under the full joint, with no size cap.
pub fn optimal_online_prefix(inst: &ProphetInstance) -> f64 {
    // Returns Pr[prefix] * value(prefix) for the block of outcomes sharing a prefix.
    fn go(inst: &ProphetInstance, depth: usize, start: usize) -> (f64, f64) {
        let space = inst.joint.space();
        if depth == space.dims() {
            return (inst.joint.probs()[start], 0.0);
        }
        let stride = space.stride(depth);
        let mut mass = 0.0;
        let mut weighted = 0.0;
        for w in 0..space.radices()[depth] {
            let (m, cont) = go(inst, depth + 1, start + w * stride);
            if m > 0.0 {
                mass += m;
                weighted += (m * inst.arrival_value(depth, w)).max(cont);
            }
        }
        (mass, weighted)
    }
    go(inst, 0, 0).1
}

/// Per-state program for an in-order path MRF: the future depends on the
/// prefix only through the current state.
pub fn optimal_online_chain(inst: &ProphetInstance) -> Result<f64> {
    if !inst.order.iter().enumerate().all(|(k, &i)| k == i) {
        return Err(Error::InvalidModel("chain program needs arrivals in path order".into()));
    }
    let chain = MarkovChain::from_path(&inst.mrf)?;
    let n = inst.len();
    // cont[a]: best continuation after deciding on item i in state a
    let mut cont = vec![0.0; inst.mrf.radices()[n - 1]];
    for i in (0..n - 1).rev() {
        let t = &chain.transitions[i];
        cont = t
            .iter()
            .map(|row| row.iter().enumerate().map(|(b, &p)| p * inst.values[i + 1][b].max(cont[b])).sum())
            .collect();
    }
    Ok(chain.initial.iter().enumerate().map(|(a, &p)| p * inst.values[0][a].max(cont[a])).sum())
}

/// Closed-form quantities of the lower-bound chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundClosedForm {
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub n: usize,
    /// `lambda[k - 1] = lambda_k`.
    pub lambda: Vec<f64>,
    pub r1: f64,
    pub r0: f64,
    /// From the explicit sum.
    pub m1: f64,
    /// From the two-state recursion.
    pub m0: f64,
}

/// `lambda_k = (q + p r^{k-1}) / (q + p r^k)` with `r = 1 - p - q`.
pub fn lambda(p: f64, q: f64, k: usize) -> f64 {
    let r = 1.0 - p - q;
    (q + p * r.powi(k as i32 - 1)) / (q + p * r.powi(k as i32))
}

/// Optimal rewards `(R^(1)_k, R^(0)_k)` for `k = 0..=n`, started from a
/// present or absent first value.
pub fn reward_recursion(p: f64, q: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 0.0)];
    for k in 1..=n {
        let (a, b) = out[k - 1];
        let l = lambda(p, q, k);
        out.push(((l * ((1.0 - p) * a + p * b)).max(1.0), l * (q * a + (1.0 - q) * b)));
    }
    out
}

/// `E[max]` pairs `(M^(1)_k, M^(0)_k)` for `k = 0..=n`.
pub fn max_recursion(p: f64, q: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 0.0)];
    for k in 1..=n {
        let (a, b) = out[k - 1];
        let l = lambda(p, q, k);
        out.push((l * ((1.0 - p) * a + p * b) + p * (1.0 - q).powi(k as i32 - 1), l * (q * a + (1.0 - q) * b)));
    }
    out
}

/// `M^(1)_n` as an explicit sum over the last index where the chain leaves state 1.
pub fn max_closed_form(p: f64, q: f64, n: usize) -> f64 {
    let r = 1.0 - p - q;
    let f = |k: usize| q + p * r.powi(k as i32);
    1.0 + p * (1..=n).map(|k| (1.0 - q).powi(k as i32 - 1) * f(k) * f(n - k) / (f(n) * (q + p))).sum::<f64>()
}

/// The path instance on which no online rule beats 1 while `E[max]` grows
/// with `delta`.
pub fn hard_instance(delta: f64) -> Result<(ProphetInstance, LowerBoundClosedForm)> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::DegenerateInstance { delta, reason: "delta must be positive".into() });
    }
    let p = 0.5;
    let q = (-4.0 * delta).exp() / (1.0 + (-4.0 * delta).exp());
    let base = 0.5 - q;
    if base <= 2.0 * q {
        return Err(Error::DegenerateInstance {
            delta,
            reason: format!("1/2 - q = {base} does not exceed 2q = {}; no valid length", 2.0 * q),
        });
    }
    let n = ((2.0 * q).ln() / base.ln()).ceil() as usize;
    let lam: Vec<f64> = (1..=n).map(|k| lambda(p, q, k)).collect();

    let mut supports = vec![vec!["1".to_string()]];
    supports.extend((1..=n).map(|_| vec!["0".to_string(), "1".to_string()]));
    let mut edges = vec![vec![-delta, delta]];
    edges.extend((2..=n).map(|_| vec![delta, -delta, -delta, delta]));
    let mut targets = vec![PathTarget::Initial(vec![1.0])];
    targets.extend((1..=n).map(|i| PathTarget::Anchored { anchor: usize::from(i > 1), probs: vec![p, 1.0 - p] }));
    let mrf = build_path_mrf(supports, edges, targets)?;

    let mut values = vec![vec![1.0]];
    let mut scale = 1.0;
    for i in 1..=n {
        scale *= lam[n - i];
        values.push(vec![0.0, scale]);
    }
    let inst = ProphetInstance::in_order(mrf, values)?;
    let (r1, r0) = reward_recursion(p, q, n)[n];
    let m0 = max_recursion(p, q, n)[n].1;
    let cf = LowerBoundClosedForm { delta, p, q, n, lambda: lam, r1, r0, m1: max_closed_form(p, q, n), m0 };
    Ok((inst, cf))
}

/// Optimal online reward, expected maximum and their ratio against the closed form.
pub fn verify_lower_bound(inst: &ProphetInstance, cf: &LowerBoundClosedForm) -> Result<Vec<BoundReport>> {
    let opt = optimal_online(inst)?;
    let emax = expected_max(inst);
    let chain = optimal_online_chain(inst)?;
    let witness = format!("n={} q={} delta_computed={}", cf.n, cf.q, inst.delta());
    Ok(vec![
        BoundReport::close("hard_optimal_online", opt, cf.r1, 1e-9, witness.clone()),
        BoundReport::close("hard_chain_program", chain, opt, 1e-12, witness.clone()),
        BoundReport::close("hard_expected_max", emax, cf.m1, 1e-9, witness.clone()),
        BoundReport::le("hard_ratio", (cf.delta + 1.0) / 2.0, emax / opt, witness),
    ])
}
