// SPDX-License-Identifier: Apache-2.0

//! Online contention resolution for a single-item constraint when activity
//! is MRF-correlated.
//!
//! Every vertex has a binary support; state 1 means the element is active.
//! Schemes considered here select an active element, when nothing has been
//! selected yet, with a fixed probability per element.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mrf::{
    agreement_potential, build_path_mrf, max_weighted_degree, numeric_labels, JointTable, MarkovChain, Mrf, PathTarget,
    DEFAULT_SUPPORT_CAP,
};
use crate::report::BoundReport;

pub const ACTIVE: usize = 1;
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Model {
    /// Joint over arrival positions.
    Joint(JointTable),
    /// In-order path; never tabulates the joint.
    Chain(MarkovChain),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcrsInstance {
    mrf: Mrf,
    order: Vec<usize>,
    x: Vec<f64>,
    model: Model,
}

impl OcrsInstance {
    /// Checks that `x` matches the exact activity marginals and sums to at most 1.
    pub fn new(mrf: Mrf, order: Vec<usize>, x: Vec<f64>) -> Result<Self> {
        let inst = Self::from_mrf(mrf, order)?;
        if x.len() != inst.x.len() {
            return Err(Error::InvalidModel(format!(
                "{} activity probabilities for {} elements",
                x.len(),
                inst.x.len()
            )));
        }
        for (k, (&given, &exact)) in x.iter().zip(&inst.x).enumerate() {
            if (given - exact).abs() > FEASIBILITY_TOL {
                return Err(Error::InvalidModel(format!("x[{k}] = {given} but the joint gives {exact}")));
            }
        }
        Ok(Self { x, ..inst })
    }

    /// Activity probabilities taken from the joint itself.
    pub fn from_mrf(mrf: Mrf, order: Vec<usize>) -> Result<Self> {
        let n = mrf.len();
        if mrf.radices().iter().any(|&r| r != 2) {
            return Err(Error::InvalidModel("every element needs a binary support".into()));
        }
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidModel("arrival order is not a permutation".into()));
        }
        let in_order = order.iter().enumerate().all(|(k, &i)| k == i);
        let (model, x) = if in_order && mrf.is_path() {
            let chain = MarkovChain::from_path(&mrf)?;
            let x = chain.marginals().iter().map(|m| m[ACTIVE]).collect();
            (Model::Chain(chain), x)
        } else {
            let joint = mrf.joint_table_with_cap(DEFAULT_SUPPORT_CAP)?.permuted(&order)?;
            let x = (0..n).map(|k| joint.marginal(k).map(|m| m[ACTIVE])).collect::<Result<Vec<_>>>()?;
            (Model::Joint(joint), x)
        };
        let total: f64 = x.iter().sum();
        if total > 1.0 + FEASIBILITY_TOL {
            return Err(Error::InvalidModel(format!("activity probabilities sum to {total} > 1")));
        }
        Ok(Self { mrf, order, x, model })
    }

    pub fn mrf(&self) -> &Mrf {
        &self.mrf
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Activity probability of each arrival position.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn delta(&self) -> f64 {
        max_weighted_degree(&self.mrf).delta
    }

    /// Walks the arrivals once. `choose(k, reach)` gets `Pr[k active and nothing
    /// selected before k]` and returns the selection probability for `k`.
    /// Yields `(reach_k, Pr[k selected])` per arrival.
    fn forward(&self, mut choose: impl FnMut(usize, f64) -> Result<f64>) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.len());
        match &self.model {
            Model::Chain(chain) => {
                let mut u = chain.initial.clone();
                for k in 0..self.len() {
                    if k > 0 {
                        u = chain.step(k - 1, &u);
                    }
                    let reach = u[ACTIVE];
                    let s = choose(k, reach)?;
                    out.push((reach, reach * s));
                    u[ACTIVE] *= 1.0 - s;
                }
            }
            Model::Joint(joint) => {
                let space = joint.space();
                let mut alive: Vec<f64> = joint.probs().to_vec();
                for k in 0..self.len() {
                    let stride = space.stride(k);
                    let active = |idx: usize| (idx / stride) % 2 == ACTIVE;
                    let reach: f64 = alive.iter().enumerate().filter(|(i, _)| active(*i)).map(|(_, p)| p).sum();
                    let s = choose(k, reach)?;
                    out.push((reach, reach * s));
                    for (i, p) in alive.iter_mut().enumerate() {
                        if active(i) {
                            *p *= 1.0 - s;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Per-arrival selection probabilities, applied when the element is active
/// and nothing is selected yet.
#[derive(Debug, Clone, PartialEq)]
pub struct OcrsScheme {
    pub q: Vec<f64>,
}

impl OcrsScheme {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if let Some(k) = q.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InfeasibleScheme { element: k, q: q[k] });
        }
        Ok(Self { q })
    }
}

/// `q_k = alpha x_k / Pr[k active and nothing selected before k]`.
pub fn adaptive_scheme(inst: &OcrsInstance, alpha: f64) -> Result<OcrsScheme> {
    Ok(adaptive_scheme_with_reach(inst, alpha)?.0)
}

/// [`adaptive_scheme`] together with the reach probabilities it divided by.
pub fn adaptive_scheme_with_reach(inst: &OcrsInstance, alpha: f64) -> Result<(OcrsScheme, Vec<f64>)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidModel(format!("alpha = {alpha} outside (0, 1]")));
    }
    let mut q = Vec::with_capacity(inst.len());
    let trace = inst.forward(|k, reach| {
        let target = alpha * inst.x[k];
        let qk = if target == 0.0 { 0.0 } else { target / reach };
        if qk.is_nan() || qk > 1.0 + FEASIBILITY_TOL {
            return Err(Error::InfeasibleScheme { element: k, q: qk });
        }
        q.push(qk.min(1.0));
        Ok(qk.min(1.0))
    })?;
    Ok((OcrsScheme { q }, trace.into_iter().map(|t| t.0).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selectability {
    /// `min_k Pr[k selected] / x_k` over elements with `x_k > 0`; 1 when there are none.
    pub min_ratio: f64,
    pub ratios: Vec<Option<f64>>,
    /// Elements that are never active.
    pub skipped: Vec<usize>,
}

pub fn selectability(inst: &OcrsInstance, scheme: &OcrsScheme) -> Result<Selectability> {
    if scheme.q.len() != inst.len() {
        return Err(Error::InvalidModel(format!(
            "scheme for {} elements, instance has {}",
            scheme.q.len(),
            inst.len()
        )));
    }
    let trace = inst.forward(|k, _| Ok(scheme.q[k]))?;
    let mut skipped = Vec::new();
    let ratios: Vec<Option<f64>> = trace
        .iter()
        .zip(&inst.x)
        .enumerate()
        .map(|(k, (&(_, sel), &x))| {
            if x > 0.0 {
                Some(sel / x)
            } else {
                skipped.push(k);
                None
            }
        })
        .collect();
    let min_ratio = ratios.iter().flatten().copied().fold(1.0, f64::min);
    Ok(Selectability { min_ratio, ratios, skipped })
}

/// Adaptive scheme at `1 / (1 + e^{4 delta})` with `delta` computed from the MRF:
/// feasibility, exact selectability, and the reach lower bound behind feasibility.
pub fn check_adaptive_scheme(inst: &OcrsInstance) -> Result<Vec<BoundReport>> {
    let delta = inst.delta();
    let alpha = 1.0 / (1.0 + (4.0 * delta).exp());
    let witness = format!("delta={delta} alpha={alpha}");
    let (scheme, reach) = match adaptive_scheme_with_reach(inst, alpha) {
        Ok(v) => v,
        Err(Error::InfeasibleScheme { element, q }) => {
            return Ok(vec![BoundReport::le("ocrs_adaptive_feasible", q, 1.0, format!("{witness} element={element}"))])
        }
        Err(e) => return Err(e),
    };
    let sel = selectability(inst, &scheme)?;
    let max_q = scheme.q.iter().copied().fold(0.0, f64::max);
    let mut out = vec![
        BoundReport::le_tol("ocrs_adaptive_feasible", max_q, 1.0, FEASIBILITY_TOL, witness.clone()),
        BoundReport::close("ocrs_selectability", sel.min_ratio, alpha, 1e-12, witness.clone()),
    ];
    let shrink = (-4.0 * delta).exp() * (1.0 - alpha);
    let worst = reach
        .iter()
        .zip(&inst.x)
        .map(|(&r, &x)| (shrink * x, r))
        .max_by(|a, b| (a.0 - a.1).total_cmp(&(b.0 - b.1)))
        .unwrap_or((0.0, 0.0));
    out.push(BoundReport::le("ocrs_reach_lower_bound", worst.0, worst.1, witness));
    Ok(out)
}

/// The path on which no scheme is much better than `4 e^{-delta}`-selectable.
pub fn hard_ocrs_instance(delta: f64) -> Result<OcrsInstance> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::DegenerateInstance { delta, reason: "delta must be positive".into() });
    }
    let (p, q) = hard_ocrs_params(delta);
    let m = hard_ocrs_len(p, q);
    if m < 2 {
        return Err(Error::DegenerateInstance { delta, reason: format!("floor((p+q)/q) = {m} < 2") });
    }
    let stationary = vec![p / (p + q), q / (p + q)];
    let mut targets = vec![PathTarget::Initial(stationary)];
    targets.extend((1..m).map(|_| PathTarget::Anchored { anchor: ACTIVE, probs: vec![p, 1.0 - p] }));
    let mrf = build_path_mrf(vec![numeric_labels(2); m], vec![agreement_potential(2, delta); m - 1], targets)?;
    OcrsInstance::new(mrf, (0..m).collect(), vec![q / (p + q); m])
}

/// `(p, q) = (1 / (1 + e^delta), 1 / (1 + e^{3 delta}))`: leave and enter probabilities of the active state.
pub fn hard_ocrs_params(delta: f64) -> (f64, f64) {
    (1.0 / (1.0 + delta.exp()), 1.0 / (1.0 + (3.0 * delta).exp()))
}

/// Number of elements, `floor((p + q) / q)`.
pub fn hard_ocrs_len(p: f64, q: f64) -> usize {
    ((p + q) / q).floor() as usize
}

/// `y_0..y_n` as `[inactive, active]` pairs: the probability of each state
/// with nothing selected through that element, when every active element
/// is selected with probability `alpha x`.
pub fn y_recursion(p: f64, q: f64, n: usize, alpha: f64) -> Vec<[f64; 2]> {
    let take = q * alpha / (p + q);
    let mut y = vec![[p / (p + q), q / (p + q) - take]];
    for _ in 0..n {
        let [a, b] = *y.last().unwrap();
        y.push([(1.0 - q) * a + p * b, q * a + (1.0 - p) * b - take]);
    }
    y
}

/// Active component of `y_n` in closed form.
pub fn y_active_closed_form(p: f64, q: f64, n: usize, alpha: f64) -> f64 {
    let s = p + q;
    let r = 1.0 - s;
    q / s * (1.0 - q * (n + 1) as f64 * alpha / s - (1.0 - r.powi(n as i32 + 1)) / s * p * alpha / s)
}

/// Largest `alpha` with a nonnegative active component of `y_n`.
pub fn max_alpha(p: f64, q: f64, n: usize) -> f64 {
    let s = p + q;
    let r = 1.0 - s;
    1.0 / (q * (n + 1) as f64 / s + (1.0 - r.powi(n as i32 + 1)) / s * p / s)
}

/// [`max_alpha`] from the iterated recursion, using that `y_n` is affine in `alpha`.
pub fn max_alpha_iterated(p: f64, q: f64, n: usize) -> f64 {
    let at0 = y_recursion(p, q, n, 0.0)[n][ACTIVE];
    let at1 = y_recursion(p, q, n, 1.0)[n][ACTIVE];
    at0 / (at0 - at1)
}

/// Best selectability found among fixed-probability schemes on `inst`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSearch {
    pub best: f64,
    pub evaluated: usize,
    pub exhaustive_deterministic: bool,
}

/// Every 0/1 scheme when there are at most `exhaustive_limit` elements
/// (otherwise the "select from index k on" family), plus `samples` random
/// fractional schemes.
pub fn search_schemes(inst: &OcrsInstance, exhaustive_limit: usize, samples: usize, seed: u64) -> Result<SchemeSearch> {
    let m = inst.len();
    let mut best = 0.0f64;
    let mut evaluated = 0;
    let mut eval = |q: Vec<f64>| -> Result<()> {
        best = best.max(selectability(inst, &OcrsScheme { q })?.min_ratio);
        evaluated += 1;
        Ok(())
    };
    let exhaustive = m <= exhaustive_limit;
    if exhaustive {
        for mask in 0u64..(1u64 << m) {
            eval((0..m).map(|k| ((mask >> k) & 1) as f64).collect())?;
        }
    } else {
        for start in 0..m {
            eval((0..m).map(|k| if k >= start { 1.0 } else { 0.0 }).collect())?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        eval((0..m).map(|_| rng.gen::<f64>()).collect())?;
    }
    Ok(SchemeSearch { best, evaluated, exhaustive_deterministic: exhaustive })
}

/// Largest `alpha` at which [`adaptive_scheme`] stays feasible, by bisection.
pub fn adaptive_threshold(inst: &OcrsInstance, iterations: usize) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    if adaptive_scheme(inst, 1.0).is_ok() {
        return Ok(1.0);
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        match adaptive_scheme(inst, mid) {
            Ok(_) => lo = mid,
            Err(Error::InfeasibleScheme { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(lo)
}

/// Upper-bound checks on the hard instance for one `delta`.
pub fn verify_ocrs_separation(delta: f64) -> Result<Vec<BoundReport>> {
    let inst = hard_ocrs_instance(delta)?;
    let (p, q) = hard_ocrs_params(delta);
    let n = inst.len() - 1;
    let closed = max_alpha(p, q, n);
    let iterated = max_alpha_iterated(p, q, n);
    let witness = format!("p={p} q={q} elements={} delta_computed={}", n + 1, inst.delta());
    let y_closed = y_active_closed_form(p, q, n, closed / 2.0);
    let y_iter = y_recursion(p, q, n, closed / 2.0)[n][ACTIVE];
    let threshold = adaptive_threshold(&inst, 60)?;
    let search = search_schemes(&inst, 16, 10_000, delta.to_bits())?;
    let mut out = vec![
        BoundReport::le("ocrs_hard_max_alpha", closed, 4.0 * (-delta).exp(), witness.clone()),
        BoundReport::close("ocrs_closed_vs_recursion", closed, iterated, 1e-12, witness.clone()),
        BoundReport::close("ocrs_y_closed_vs_recursion", y_closed, y_iter, 1e-12, witness.clone()),
        BoundReport::close("ocrs_adaptive_threshold", threshold, closed, 1e-9, witness.clone()),
        BoundReport::le_tol(
            "ocrs_scheme_search",
            search.best,
            closed + 1e-9,
            0.0,
            format!("{witness} evaluated={} exhaustive={}", search.evaluated, search.exhaustive_deterministic),
        ),
    ];
    out.extend(check_adaptive_scheme(&inst)?);
    Ok(out)
}
