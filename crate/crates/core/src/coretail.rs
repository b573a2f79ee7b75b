// SPDX-License-Identifier: Apache-2.0

//! Core-tail decompositions and the revenue inequalities built on them.
//!
//! Per outcome, an item is in the tail when its singleton value reaches the
//! cutoff and in the core otherwise. Core and tail valuations keep only the
//! items on their side, so `v^T + v^C = v` pointwise for additive buyers.

use std::fmt;

use crate::error::{Error, Result};
use crate::mechanisms::{brev, optimal_rev, optimal_rev_with_cap, rev_i, srev, srev_prime, DEFAULT_LP_VAR_CAP};
use crate::mrf::independent_envelope;
use crate::report::BoundReport;
use crate::valuation::{ItemSet, ValuationDistribution, ValuationKind, ValueWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Additive,
    UnitDemand,
    Subadditive,
}

impl Setting {
    pub fn of(kind: ValuationKind) -> Self {
        match kind {
            ValuationKind::Additive => Setting::Additive,
            ValuationKind::UnitDemand => Setting::UnitDemand,
            ValuationKind::SubadditiveTable => Setting::Subadditive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Additive => "additive",
            Setting::UnitDemand => "unit_demand",
            Setting::Subadditive => "subadditive",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Simple-mechanism revenues and the optimum, computed once per distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmarks {
    pub rev: f64,
    pub srev: f64,
    pub srev_grid_restricted: bool,
    pub brev: f64,
    pub srev_prime: f64,
    pub lp_iterations: usize,
}

impl Benchmarks {
    pub fn compute(d: &ValuationDistribution) -> Result<Self> {
        Self::compute_with_cap(d, DEFAULT_LP_VAR_CAP)
    }

    pub fn compute_with_cap(d: &ValuationDistribution, lp_var_cap: usize) -> Result<Self> {
        let opt = optimal_rev_with_cap(d, lp_var_cap)?;
        let s = srev(d);
        Ok(Self {
            rev: opt.revenue,
            srev: s.revenue,
            srev_grid_restricted: s.grid_restricted,
            brev: brev(d).revenue,
            srev_prime: srev_prime(d).revenue,
            lp_iterations: opt.iterations,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreTailSplit {
    pub setting: Setting,
    pub delta: f64,
    /// `SRev(D)`; the scale of the additive and unit-demand cutoffs.
    pub r: f64,
    pub cutoff: f64,
    /// `q_i = Pr[i in T]`.
    pub tail_probs: Vec<f64>,
    /// Subadditive only: the largest support value whose upper tail still
    /// exceeds the budget (0 if none does). The tail `{g >= cutoff}` equals
    /// `{g > boundary}`.
    pub boundary: Option<f64>,
}

impl CoreTailSplit {
    pub fn tail_window(&self) -> ValueWindow {
        ValueWindow::at_least(self.cutoff)
    }

    pub fn core_window(&self) -> ValueWindow {
        ValueWindow::below(self.cutoff)
    }

    /// Core items with value at most `r`.
    pub fn small_window(&self) -> ValueWindow {
        if self.cutoff > self.r {
            ValueWindow::at_most(self.r)
        } else {
            ValueWindow::below(self.cutoff)
        }
    }

    /// Core items with value in `(r, cutoff)`.
    pub fn large_window(&self) -> ValueWindow {
        ValueWindow::between(self.r, self.cutoff)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_probs.iter().sum()
    }
}

/// Positive singleton values with positive probability, ascending.
fn support_values(d: &ValuationDistribution) -> Vec<f64> {
    let mut vals: Vec<f64> =
        d.items().iter().flat_map(|i| d.item_distribution(i)).map(|p| p.0).filter(|&v| v > 0.0).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    vals
}

fn tail_probs(d: &ValuationDistribution, cutoff: f64) -> Vec<f64> {
    (0..d.num_items())
        .map(|i| if d.items().contains(i) { d.joint().event_prob(|s| d.singleton(i, s) >= cutoff) } else { 0.0 })
        .collect()
}

/// Splits with the cutoff for the valuation's class.
///
/// Additive: `e^{8 delta} SRev`. Unit-demand: `e^{8 delta + 1} SRev`.
/// Subadditive: the smallest support value `t` with `sum_i Pr[g(t_i) >= t] <=
/// e^{-8 delta - 1}`, or `+inf` (empty tail) when no value qualifies.
pub fn compute_split(d: &ValuationDistribution, delta: f64, bench: &Benchmarks) -> CoreTailSplit {
    let setting = Setting::of(d.kind());
    let r = bench.srev;
    let scaled = |k: f64| {
        if r > 0.0 {
            (k * delta + if setting == Setting::UnitDemand { 1.0 } else { 0.0 }).exp() * r
        } else {
            f64::INFINITY
        }
    };
    let (cutoff, boundary) = match setting {
        Setting::Additive | Setting::UnitDemand => (scaled(8.0), None),
        Setting::Subadditive => {
            let budget = (-8.0 * delta - 1.0).exp();
            let values = support_values(d);
            let k = values.iter().position(|&t| tail_probs(d, t).iter().sum::<f64>() <= budget);
            let cutoff = k.map_or(f64::INFINITY, |k| values[k]);
            let boundary = match k {
                Some(0) => 0.0,
                Some(k) => values[k - 1],
                None => values.last().copied().unwrap_or(0.0),
            };
            (cutoff, Some(boundary))
        }
    };
    CoreTailSplit { setting, delta, r, cutoff, tail_probs: tail_probs(d, cutoff), boundary }
}

/// `Pr[T = A]` for every feasible `A`, in increasing mask order.
pub fn tail_events(d: &ValuationDistribution, cutoff: f64) -> Vec<(ItemSet, f64)> {
    let mut probs = std::collections::BTreeMap::new();
    d.joint().for_each_positive(|s, p| *probs.entry(d.tail_set(s, cutoff)).or_insert(0.0) += p);
    probs.into_iter().collect()
}

/// `Rev(D) <= 2 (Val(D^A) + Rev(D^B))` for one bipartition of the items in play.
pub fn check_marginal_mechanism(d: &ValuationDistribution, a: ItemSet, rev: f64) -> Result<BoundReport> {
    let b = d.items().minus(a);
    if !a.is_subset(d.items()) {
        return Err(Error::Valuation(format!("{a} is not a subset of the items in play")));
    }
    let val_a = d.restrict(a)?.val();
    let rev_b = if b == d.items() { rev } else { optimal_rev(&d.restrict(b)?)?.revenue };
    Ok(BoundReport::le("marginal_mechanism", rev, 2.0 * (val_a + rev_b), format!("A={a} B={b}")))
}

/// [`check_marginal_mechanism`] over every bipartition.
pub fn check_all_bipartitions(d: &ValuationDistribution, rev: f64) -> Result<Vec<BoundReport>> {
    d.items().subsets().map(|a| check_marginal_mechanism(d, a, rev)).collect()
}

/// `Rev(D) <= 2 (rho + 1) e^{4 delta} sum_i Rev_i(D)`.
pub fn check_crude_bound(d: &ValuationDistribution, delta: f64, rev: f64) -> Result<BoundReport> {
    let rho = d.rho()?;
    let sum_rev: f64 = d.items().iter().map(|i| rev_i(d, i).revenue).sum();
    let rhs = 2.0 * (rho.rho + 1.0) * (4.0 * delta).exp() * sum_rev;
    Ok(BoundReport::le("crude_rev_bound", rev, rhs, format!("rho={} skipped={}", rho.rho, rho.skipped)))
}

/// Bounds on the expected core value.
pub fn check_core_claims(d: &ValuationDistribution, split: &CoreTailSplit, bench: &Benchmarks) -> Vec<BoundReport> {
    let delta = split.delta;
    let core = d.with_window(split.core_window());
    let val_c = core.val();
    let r = split.r;
    let cut = format!("cutoff={}", split.cutoff);
    match split.setting {
        Setting::Additive => {
            let n = d.items().len().max(1) as f64;
            let small = d.with_window(split.small_window());
            let mu = small.val();
            let second = small.joint().expectation(|s| small.value_all(s).powi(2));
            let var = (second - mu * mu).max(0.0);
            let brev_small = brev(&small).revenue;
            vec![
                BoundReport::le("core_val_log", val_c, (1.0 + 8.0 * delta + n.ln()) * r, cut.clone()),
                BoundReport::le(
                    "core_val_refined",
                    val_c,
                    (22.0 * delta + 1.0) * r + 35.0 * (delta + 1.0) * brev_small,
                    format!("{cut} brev_small={brev_small}"),
                ),
                BoundReport::le(
                    "core_small_variance",
                    var,
                    2.0 * r * r + ((4.0 * delta).exp() - 1.0) * mu * mu,
                    format!("mu={mu}"),
                ),
            ]
        }
        Setting::UnitDemand => {
            vec![BoundReport::le("core_val_unit_demand", val_c, (22.0 * delta + 4.0) * r, cut)]
        }
        Setting::Subadditive => {
            let brev_core = brev(&core).revenue;
            vec![
                BoundReport::le(
                    "core_val_subadditive",
                    val_c,
                    (174.0 * delta + 55.0) * brev_core + bench.srev_prime,
                    format!("{cut} brev_core={brev_core}"),
                ),
                check_cutoff(split, bench),
                check_cutoff_boundary(split, bench),
            ]
        }
    }
}

/// `t <= e^{8 delta + 2} SRev'(D)` for the subadditive cutoff.
pub fn check_cutoff(split: &CoreTailSplit, bench: &Benchmarks) -> BoundReport {
    BoundReport::le(
        "subadditive_cutoff",
        split.cutoff,
        (8.0 * split.delta + 2.0).exp() * bench.srev_prime,
        format!("tail_mass={}", split.tail_mass()),
    )
}

/// The same bound evaluated at [`CoreTailSplit::boundary`], the point where
/// the tail budget is first met.
pub fn check_cutoff_boundary(split: &CoreTailSplit, bench: &Benchmarks) -> BoundReport {
    BoundReport::le(
        "subadditive_cutoff_boundary",
        split.boundary.unwrap_or(0.0),
        (8.0 * split.delta + 2.0).exp() * bench.srev_prime,
        format!("cutoff={}", split.cutoff),
    )
}

/// `sum_A Pr[T = A] Rev(D^T_A)` against the class's tail bound.
pub fn check_tail_claims(
    d: &ValuationDistribution,
    split: &CoreTailSplit,
    bench: &Benchmarks,
) -> Result<Vec<BoundReport>> {
    let tail = d.with_window(split.tail_window());
    let mut lhs = 0.0;
    let mut feasible = 0;
    for (a, p) in tail_events(d, split.cutoff) {
        if a.is_empty() {
            continue;
        }
        feasible += 1;
        lhs += p * optimal_rev(&tail.condition_on_tail(split.cutoff, a)?)?.revenue;
    }
    let witness = format!("cutoff={} feasible_tails={feasible}", split.cutoff);
    let mut out = Vec::new();
    match split.setting {
        Setting::Additive => out.push(BoundReport::le("tail_rev", lhs, 5.0 * srev(&tail).revenue, witness)),
        Setting::UnitDemand => out.push(BoundReport::le("tail_rev", lhs, 3.0 * srev(&tail).revenue, witness)),
        Setting::Subadditive => {
            out.push(BoundReport::le("tail_rev", lhs, 4.0 * bench.srev_prime, witness));
            if split.tail_mass() <= (-8.0 * split.delta - 1.0).exp() {
                let sum_rev: f64 = tail.items().iter().map(|i| rev_i(&tail, i).revenue).sum();
                out.push(BoundReport::le(
                    "tail_single_sale",
                    sum_rev,
                    2.0 * srev_prime(&tail).revenue,
                    format!("tail_mass={}", split.tail_mass()),
                ));
            }
        }
    }
    Ok(out)
}

/// `Rev(D) <= sum_A Pr[T = A] Rev(D_A)`: conditioning on the tail set can only help the seller.
pub fn check_total_revenue(
    d: &ValuationDistribution,
    split: &CoreTailSplit,
    bench: &Benchmarks,
) -> Result<BoundReport> {
    let mut rhs = 0.0;
    let events = tail_events(d, split.cutoff);
    for &(a, p) in &events {
        rhs += if events.len() == 1 {
            bench.rev
        } else {
            p * optimal_rev(&d.condition_on_tail(split.cutoff, a)?)?.revenue
        };
    }
    Ok(BoundReport::le("total_revenue_split", bench.rev, rhs, format!("feasible_tails={}", events.len())))
}

/// Headline bounds on `Rev(D)` for the valuation's class.
pub fn check_theorems(d: &ValuationDistribution, delta: f64, bench: &Benchmarks) -> Vec<BoundReport> {
    let n = d.items().len().max(1) as f64;
    let b = bench;
    match Setting::of(d.kind()) {
        Setting::Additive => vec![
            BoundReport::le(
                "rev_srev_brev",
                b.rev,
                (44.0 * delta + 12.0) * b.srev + 70.0 * (delta + 1.0) * b.brev,
                format!("srev={} brev={}", b.srev, b.brev),
            ),
            BoundReport::le(
                "rev_srev_log",
                b.rev,
                (12.0 + 16.0 * delta + 2.0 * n.ln()) * b.srev,
                format!("srev={}", b.srev),
            ),
        ],
        Setting::UnitDemand => {
            vec![BoundReport::le("rev_unit_demand", b.rev, (44.0 * delta + 14.0) * b.srev, format!("srev={}", b.srev))]
        }
        Setting::Subadditive => vec![
            BoundReport::le(
                "rev_subadditive",
                b.rev,
                (348.0 * delta + 110.0) * b.brev + 10.0 * b.srev,
                format!("srev={} brev={}", b.srev, b.brev),
            ),
            BoundReport::le(
                "rev_subadditive_single_sale",
                b.rev,
                (348.0 * delta + 110.0) * b.brev + 10.0 * b.srev_prime,
                format!("srev_prime={} brev={}", b.srev_prime, b.brev),
            ),
        ],
    }
}

/// `Pr[v >= tau] <= e^{4 delta} Pr[v(t^ind) >= e^{-4 delta} tau]` at every positive value `tau` of `v`.
pub fn check_envelope_dominance(d: &ValuationDistribution, delta: f64) -> Result<Vec<BoundReport>> {
    let env = independent_envelope(d.joint())?;
    let denv = d.with_joint(env.table)?;
    let dist = d.value_distribution(d.items());
    let env_dist = denv.value_distribution(d.items());
    let shrink = (-4.0 * delta).exp();
    let grow = (4.0 * delta).exp();
    let survival = |pts: &[(f64, f64)], tau: f64| pts.iter().filter(|p| p.0 >= tau).map(|p| p.1).sum::<f64>();
    Ok(dist
        .iter()
        .filter(|p| p.0 > 0.0)
        .map(|&(tau, _)| {
            BoundReport::le(
                "envelope_dominance",
                survival(&dist, tau),
                grow * survival(&env_dist, shrink * tau),
                format!("tau={tau}"),
            )
        })
        .collect())
}

/// Everything above for one distribution.
pub fn check_all(d: &ValuationDistribution, delta: f64) -> Result<Vec<BoundReport>> {
    let bench = Benchmarks::compute(d)?;
    let mut out = check_theorems(d, delta, &bench);
    out.extend(check_lemmas(d, delta, &bench)?);
    Ok(out)
}

/// Everything except the headline revenue bounds.
pub fn check_lemmas(d: &ValuationDistribution, delta: f64, bench: &Benchmarks) -> Result<Vec<BoundReport>> {
    let split = compute_split(d, delta, bench);
    let mut out = check_all_bipartitions(d, bench.rev)?;
    if d.items().len() >= 2 {
        match check_crude_bound(d, delta, bench.rev) {
            Ok(r) => out.push(r),
            Err(Error::UndefinedRatio) => {}
            Err(e) => return Err(e),
        }
    }
    out.extend(check_core_claims(d, &split, bench));
    out.extend(check_tail_claims(d, &split, bench)?);
    out.push(check_total_revenue(d, &split, bench)?);
    if split.setting == Setting::Subadditive {
        out.extend(check_envelope_dominance(d, delta)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{agreement_potential, max_weighted_degree, numeric_labels, HyperEdge, JointTable, Mrf};
    use crate::valuation::SetValuation;
    use approx::assert_abs_diff_eq;

    fn iid_pair_additive() -> ValuationDistribution {
        let joint = JointTable::product(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        ValuationDistribution::new(joint, SetValuation::additive(vec![vec![1.0, 2.0]; 2]).unwrap()).unwrap()
    }

    fn ln2_pair(g: SetValuation) -> (ValuationDistribution, f64) {
        let mrf = Mrf::new(
            vec![numeric_labels(2), numeric_labels(2)],
            vec![vec![0.0; 2]; 2],
            vec![HyperEdge::new(vec![0, 1], agreement_potential(2, 2f64.ln()))],
        )
        .unwrap();
        let delta = max_weighted_degree(&mrf).delta;
        (ValuationDistribution::new(mrf.joint_table().unwrap(), g).unwrap(), delta)
    }

    #[test]
    fn independent_additive_pair_passes_everything() {
        let d = iid_pair_additive();
        let reports = check_all(&d, 0.0).unwrap();
        for r in &reports {
            assert!(r.pass, "{r}");
        }
        let bench = Benchmarks::compute(&d).unwrap();
        let crude = check_crude_bound(&d, 0.0, bench.rev).unwrap();
        assert_abs_diff_eq!(crude.rhs, 2.0 * 2.0 * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_bipartitions() {
        let d = iid_pair_additive();
        let rev = optimal_rev(&d).unwrap().revenue;
        let all_b = check_marginal_mechanism(&d, ItemSet::EMPTY, rev).unwrap();
        assert_abs_diff_eq!(all_b.rhs, 2.0 * rev, epsilon = 1e-12);
        let all_a = check_marginal_mechanism(&d, ItemSet::full(2), rev).unwrap();
        assert_abs_diff_eq!(all_a.rhs, 2.0 * 3.0, epsilon = 1e-12);
    }

    #[test]
    fn additive_split_cutoff_and_tail() {
        let d = iid_pair_additive();
        let bench = Benchmarks::compute(&d).unwrap();
        let split = compute_split(&d, 0.0, &bench);
        assert_eq!(split.cutoff, 2.0);
        // Both items hit the tail on value 2.
        assert_abs_diff_eq!(split.tail_mass(), 1.0, epsilon = 1e-12);
        let big = d.with_window(split.tail_window());
        assert_abs_diff_eq!(big.val(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_demand_cutoff_above_all_values_leaves_empty_tail() {
        let (d, delta) = ln2_pair(SetValuation::unit_demand(vec![vec![1.0, 2.0]; 2]).unwrap());
        let bench = Benchmarks::compute(&d).unwrap();
        let split = compute_split(&d, delta, &bench);
        assert!(split.tail_mass() == 0.0);
        let tail = check_tail_claims(&d, &split, &bench).unwrap();
        assert_eq!(tail[0].lhs, 0.0);
        for r in check_all(&d, delta).unwrap() {
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn subadditive_cutoff_respects_budget() {
        let g = SetValuation::tabulate(&[2, 2], |t| {
            let vals: Vec<f64> =
                t.iter().enumerate().filter_map(|(i, w)| w.map(|w| [1.0, 8.0][w] + i as f64)).collect();
            let sum: f64 = vals.iter().sum();
            let max = vals.iter().copied().fold(0.0, f64::max);
            sum.min(1.5 * max)
        })
        .unwrap();
        assert!(g.validate_class().pass);
        let joint = JointTable::product(&[vec![0.95, 0.05], vec![0.97, 0.03]]).unwrap();
        let d = ValuationDistribution::new(joint, g).unwrap();
        let bench = Benchmarks::compute(&d).unwrap();
        let split = compute_split(&d, 0.0, &bench);
        assert!(split.tail_mass() <= (-1f64).exp());
        assert_eq!(split.cutoff, 8.0);
    }

    #[test]
    fn envelope_dominance_on_correlated_pair() {
        let (d, delta) = ln2_pair(SetValuation::additive(vec![vec![1.0, 3.0]; 2]).unwrap());
        let reps = check_envelope_dominance(&d, delta).unwrap();
        assert!(!reps.is_empty());
        assert!(reps.iter().all(|r| r.pass));
        let ind = iid_pair_additive();
        for r in check_envelope_dominance(&ind, 0.0).unwrap() {
            assert!(r.lhs <= r.rhs + 1e-12);
        }
    }
}
