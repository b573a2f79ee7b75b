// SPDX-License-Identifier: Apache-2.0

//! Posted-price mechanisms, exact buyer simulation for lottery menus, and the
//! linear program for the revenue-optimal single-buyer mechanism.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpSolution};
use crate::valuation::{ItemSet, ValuationDistribution, ValuationKind};

pub const DEFAULT_LP_VAR_CAP: usize = 100_000;

/// Relative tolerance under which two buyer utilities count as tied.
pub const CHOICE_TOL: f64 = 1e-9;

/// Per-item prices; `f64::INFINITY` means the item is not offered.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(pub Vec<f64>);

impl PriceVector {
    pub fn unpriced(n: usize) -> Self {
        PriceVector(vec![f64::INFINITY; n])
    }

    pub fn offered(&self) -> ItemSet {
        ItemSet::from_items(self.0.iter().enumerate().filter(|(_, p)| p.is_finite()).map(|(i, _)| i))
    }

    pub fn total(&self, s: ItemSet) -> f64 {
        s.iter().map(|i| self.0[i]).sum()
    }
}

impl fmt::Display for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            if p.is_finite() {
                write!(f, "{p}")?;
            } else {
                f.write_str("inf")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MenuOption {
    /// `(bundle, probability)`; missing mass goes to the empty bundle.
    pub lottery: Vec<(ItemSet, f64)>,
    pub price: f64,
}

impl MenuOption {
    pub fn deterministic(bundle: ItemSet, price: f64) -> Self {
        Self { lottery: vec![(bundle, 1.0)], price }
    }

    pub fn expected_value(&self, mut v: impl FnMut(ItemSet) -> f64) -> f64 {
        self.lottery.iter().map(|&(s, q)| if q == 0.0 { 0.0 } else { q * v(s) }).sum()
    }
}

/// A menu; the option `(empty, 0)` is always implicitly available.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Menu {
    pub options: Vec<MenuOption>,
}

impl Menu {
    pub fn validate(&self) -> Result<()> {
        for (k, o) in self.options.iter().enumerate() {
            if !(o.price.is_finite() && o.price >= 0.0) {
                return Err(Error::Valuation(format!("option {k}: price {}", o.price)));
            }
            let mass: f64 = o.lottery.iter().map(|l| l.1).sum();
            if o.lottery.iter().any(|l| l.1 < 0.0) || mass > 1.0 + 1e-9 {
                return Err(Error::Valuation(format!("option {k}: lottery mass {mass}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub revenue: f64,
    /// `f64::INFINITY` when nothing is worth selling.
    pub price: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparateResult {
    pub revenue: f64,
    pub prices: PriceVector,
    /// True when the search was limited to the singleton-value grid and may miss the optimum.
    pub grid_restricted: bool,
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= CHOICE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Best posted price for a value distribution given as sorted `(value, prob)` pairs.
/// Ties go to the lower price.
pub fn best_price(points: &[(f64, f64)]) -> PriceResult {
    let mut best = PriceResult { revenue: 0.0, price: f64::INFINITY };
    let mut upper: f64 = points.iter().map(|p| p.1).sum();
    for &(v, p) in points {
        if v > 0.0 {
            let r = v * upper;
            if r > best.revenue && !ties(r, best.revenue) {
                best = PriceResult { revenue: r, price: v };
            }
        }
        upper -= p;
    }
    best
}

/// `max_p p Pr[v({i}) >= p]`.
pub fn rev_i(d: &ValuationDistribution, i: usize) -> PriceResult {
    if !d.items().contains(i) {
        return PriceResult { revenue: 0.0, price: f64::INFINITY };
    }
    best_price(&d.item_distribution(i))
}

/// Index of the chosen option, or `None` for the implicit `(empty, 0)`.
///
/// Maximizes expected value minus price; ties go to the higher price, then
/// the lower index.
pub fn buyer_choice(menu: &Menu, mut v: impl FnMut(ItemSet) -> f64) -> Option<usize> {
    let mut best: (Option<usize>, f64, f64) = (None, 0.0, 0.0);
    for (k, o) in menu.options.iter().enumerate() {
        let u = o.expected_value(&mut v) - o.price;
        let better = if ties(u, best.1) { o.price > best.2 && !ties(o.price, best.2) } else { u > best.1 };
        if better {
            best = (Some(k), u, o.price);
        }
    }
    best.0
}

pub fn menu_revenue(d: &ValuationDistribution, menu: &Menu) -> f64 {
    d.joint().expectation(|s| match buyer_choice(menu, |set| d.value(s, set)) {
        Some(k) => menu.options[k].price,
        None => 0.0,
    })
}

/// Bundle demanded at posted prices; ties go to the larger payment, then the smaller mask.
pub fn demanded_bundle(prices: &PriceVector, mut v: impl FnMut(ItemSet) -> f64) -> ItemSet {
    let mut best = (ItemSet::EMPTY, 0.0, 0.0);
    for s in prices.offered().subsets().skip(1) {
        let pay = prices.total(s);
        let u = v(s) - pay;
        let better = if ties(u, best.1) { pay > best.2 && !ties(pay, best.2) } else { u > best.1 };
        if better {
            best = (s, u, pay);
        }
    }
    best.0
}

/// Grid of candidate prices per item: positive singleton values and `inf`.
fn price_grid(d: &ValuationDistribution) -> Vec<Vec<f64>> {
    (0..d.num_items())
        .map(|i| {
            let mut g: Vec<f64> = if d.items().contains(i) {
                d.item_distribution(i).into_iter().map(|p| p.0).filter(|&v| v > 0.0).collect()
            } else {
                Vec::new()
            };
            g.push(f64::INFINITY);
            g
        })
        .collect()
}

fn grid_search(d: &ValuationDistribution, mut objective: impl FnMut(&PriceVector) -> f64) -> (f64, PriceVector) {
    let grid = price_grid(d);
    let radices: Vec<usize> = grid.iter().map(Vec::len).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut best = (0.0, PriceVector::unpriced(radices.len()));
    loop {
        let pv = PriceVector(digits.iter().zip(&grid).map(|(&k, g)| g[k]).collect());
        let r = objective(&pv);
        if r > best.0 && !ties(r, best.0) {
            best = (r, pv);
        }
        if !crate::space::advance(&mut digits, &radices) {
            break;
        }
    }
    best
}

/// Revenue of posting `prices` to a buyer who picks the utility-maximizing bundle.
pub fn posted_price_revenue(d: &ValuationDistribution, prices: &PriceVector) -> f64 {
    d.joint().expectation(|s| prices.total(demanded_bundle(prices, |set| d.value(s, set))))
}

/// Optimal separate pricing. Exact for additive buyers; a grid search otherwise.
pub fn srev(d: &ValuationDistribution) -> SeparateResult {
    if d.kind() == ValuationKind::Additive {
        let per: Vec<PriceResult> = (0..d.num_items()).map(|i| rev_i(d, i)).collect();
        return SeparateResult {
            revenue: per.iter().map(|r| r.revenue).sum(),
            prices: PriceVector(per.iter().map(|r| r.price).collect()),
            grid_restricted: false,
        };
    }
    let (revenue, prices) = grid_search(d, |pv| posted_price_revenue(d, pv));
    SeparateResult { revenue, prices, grid_restricted: true }
}

/// Revenue of `prices` counted only on outcomes where exactly one item's value meets its price.
pub fn single_sale_revenue(d: &ValuationDistribution, prices: &PriceVector) -> f64 {
    let n = d.num_items();
    d.joint().expectation(|s| {
        let mut hit = None;
        for i in 0..n {
            if d.item_value(s, i) >= prices.0[i] {
                if hit.is_some() {
                    return 0.0;
                }
                hit = Some(i);
            }
        }
        hit.map_or(0.0, |i| prices.0[i])
    })
}

/// Maximizes [`single_sale_revenue`]. Raising a price up to the next support
/// value never loses revenue, so the grid search is exact.
pub fn srev_prime(d: &ValuationDistribution) -> SeparateResult {
    let (revenue, prices) = grid_search(d, |pv| single_sale_revenue(d, pv));
    SeparateResult { revenue, prices, grid_restricted: false }
}

/// `max_p p Pr[v(items) >= p]`.
pub fn brev(d: &ValuationDistribution) -> PriceResult {
    best_price(&d.value_distribution(d.items()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevResult {
    pub revenue: f64,
    /// One option per merged type, in the order of `type_outcomes`.
    pub menu: Menu,
    /// A representative outcome of each merged type.
    pub type_outcomes: Vec<Vec<usize>>,
    pub type_probs: Vec<f64>,
    pub iterations: usize,
    pub lp_vars: usize,
    pub lp_rows: usize,
}

impl RevResult {
    /// Worst IR or IC violation of the menu, re-evaluated on each type.
    pub fn incentive_violation(&self, d: &ValuationDistribution) -> f64 {
        let mut worst = 0.0f64;
        for (t, s) in self.type_outcomes.iter().enumerate() {
            let u = |o: &MenuOption| o.expected_value(|set| d.value(s, set)) - o.price;
            let own = u(&self.menu.options[t]);
            worst = worst.max(-own);
            for o in &self.menu.options {
                worst = worst.max(u(o) - own);
            }
        }
        worst
    }
}

/// Types merged by valuation vector over the relevant items.
struct TypeTable {
    bundles: Vec<ItemSet>,
    /// `values[t][k] = v_t(bundles[k])`.
    values: Vec<Vec<f64>>,
    probs: Vec<f64>,
    outcomes: Vec<Vec<usize>>,
}

fn collect_types(d: &ValuationDistribution) -> TypeTable {
    let additive = d.kind() == ValuationKind::Additive;
    let mut positive: Vec<(Vec<usize>, f64)> = Vec::new();
    d.joint().for_each_positive(|s, p| positive.push((s.to_vec(), p)));
    let in_play = d.items();
    // An item matters if adding it ever changes a value.
    let items: Vec<usize> = in_play
        .iter()
        .filter(|&i| {
            positive.iter().any(|(s, _)| {
                if additive {
                    return d.item_value(s, i) != 0.0;
                }
                in_play
                    .minus(ItemSet::single(i))
                    .subsets()
                    .any(|set| d.value(s, set.union(ItemSet::single(i))) != d.value(s, set))
            })
        })
        .collect();
    let relevant = ItemSet::from_items(items.iter().copied());
    let bundles: Vec<ItemSet> = if additive {
        items.iter().map(|&i| ItemSet::single(i)).collect()
    } else {
        relevant.subsets().skip(1).collect()
    };
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut table = TypeTable { bundles, values: Vec::new(), probs: Vec::new(), outcomes: Vec::new() };
    for (s, p) in positive {
        let vals: Vec<f64> = table.bundles.iter().map(|&b| d.value(&s, b)).collect();
        let key: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
        match index.get(&key) {
            Some(&t) => table.probs[t] += p,
            None => {
                index.insert(key, table.values.len());
                table.values.push(vals);
                table.probs.push(p);
                table.outcomes.push(s);
            }
        }
    }
    table
}

pub fn optimal_rev(d: &ValuationDistribution) -> Result<RevResult> {
    optimal_rev_with_cap(d, DEFAULT_LP_VAR_CAP)
}

/// Revenue-optimal menu by LP over merged types.
///
/// Per type `t`: bundle weights `x_{t,k}` with `sum_k x_{t,k} <= 1` (one
/// weight per item for additive buyers, one per nonempty bundle otherwise)
/// and a payment `p_t`. IR and IC are imposed for every type and ordered pair.
pub fn optimal_rev_with_cap(d: &ValuationDistribution, cap: usize) -> Result<RevResult> {
    let additive = d.kind() == ValuationKind::Additive;
    let tt = collect_types(d);
    let nt = tt.probs.len();
    let k = tt.bundles.len();
    if k == 0 || nt == 0 {
        let menu = Menu { options: vec![MenuOption { lottery: Vec::new(), price: 0.0 }; nt] };
        return Ok(RevResult {
            revenue: 0.0,
            menu,
            type_outcomes: tt.outcomes,
            type_probs: tt.probs,
            iterations: 0,
            lp_vars: 0,
            lp_rows: 0,
        });
    }
    let w = k + 1;
    let vars = nt * w;
    if vars > cap {
        return Err(Error::LpTooLarge { vars, cap });
    }
    let x = |t: usize, b: usize| t * w + b;
    let pay = |t: usize| t * w + k;
    let mut objective = vec![0.0; vars];
    for t in 0..nt {
        objective[pay(t)] = tt.probs[t];
    }
    let mut lp = LpProblem::new(objective);
    for t in 0..nt {
        if additive {
            for b in 0..k {
                let mut row = vec![0.0; vars];
                row[x(t, b)] = 1.0;
                lp.le(row, 1.0);
            }
        } else {
            let mut row = vec![0.0; vars];
            for b in 0..k {
                row[x(t, b)] = 1.0;
            }
            lp.le(row, 1.0);
        }
    }
    for t in 0..nt {
        let mut row = vec![0.0; vars];
        for b in 0..k {
            row[x(t, b)] = -tt.values[t][b];
        }
        row[pay(t)] = 1.0;
        lp.le(row, 0.0);
    }
    for t in 0..nt {
        for o in 0..nt {
            if o == t {
                continue;
            }
            // u_t(option o) <= u_t(option t)
            let mut row = vec![0.0; vars];
            for b in 0..k {
                row[x(o, b)] += tt.values[t][b];
                row[x(t, b)] -= tt.values[t][b];
            }
            row[pay(o)] -= 1.0;
            row[pay(t)] += 1.0;
            lp.le(row, 0.0);
        }
    }
    let lp_rows = lp.constraints.len();
    let sol: LpSolution = lp.solve()?;
    let options = (0..nt)
        .map(|t| MenuOption {
            lottery: (0..k).map(|b| (tt.bundles[b], sol.x[x(t, b)])).filter(|l| l.1 > 0.0).collect(),
            price: sol.x[pay(t)],
        })
        .collect();
    Ok(RevResult {
        revenue: sol.objective,
        menu: Menu { options },
        type_outcomes: tt.outcomes,
        type_probs: tt.probs,
        iterations: sol.iterations,
        lp_vars: vars,
        lp_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::JointTable;
    use crate::valuation::SetValuation;
    use approx::assert_abs_diff_eq;

    fn single(values: Vec<f64>, probs: Vec<f64>) -> ValuationDistribution {
        let joint = JointTable::product(&[probs]).unwrap();
        ValuationDistribution::new(joint, SetValuation::additive(vec![values]).unwrap()).unwrap()
    }

    fn iid_pair(kind: ValuationKind) -> ValuationDistribution {
        let joint = JointTable::product(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let s = vec![vec![1.0, 2.0]; 2];
        let g = match kind {
            ValuationKind::Additive => SetValuation::additive(s),
            ValuationKind::UnitDemand => SetValuation::unit_demand(s),
            ValuationKind::SubadditiveTable => unreachable!(),
        };
        ValuationDistribution::new(joint, g.unwrap()).unwrap()
    }

    #[test]
    fn rev_i_examples() {
        let r = rev_i(&single(vec![1.0, 2.0], vec![0.5, 0.5]), 0);
        assert_eq!((r.revenue, r.price), (1.0, 1.0));
        assert_eq!(rev_i(&single(vec![3.5], vec![1.0]), 0).revenue, 3.5);
        let r = rev_i(&single(vec![1.0, 2.0, 4.0], vec![0.5, 0.25, 0.25]), 0);
        assert_eq!((r.revenue, r.price), (1.0, 1.0));
        let r = rev_i(&single(vec![0.0, 0.0], vec![0.5, 0.5]), 0);
        assert_eq!(r.revenue, 0.0);
        assert!(r.price.is_infinite());
    }

    #[test]
    fn buyer_choice_ties_favor_seller() {
        let over = Menu { options: vec![MenuOption::deterministic(ItemSet::single(0), 5.0)] };
        assert_eq!(buyer_choice(&over, |_| 1.0), None);
        let tied = Menu {
            options: vec![
                MenuOption::deterministic(ItemSet::single(0), 1.0),
                MenuOption::deterministic(ItemSet::full(2), 2.0),
            ],
        };
        let v = |s: ItemSet| s.len() as f64 * 1.5 + if s.len() == 2 { -0.5 } else { 0.0 };
        // utilities: 0.5 and 0.5
        assert_eq!(buyer_choice(&tied, v), Some(1));
        assert_eq!(buyer_choice(&Menu::default(), |_| 10.0), None);
    }

    #[test]
    fn menu_revenue_examples() {
        let d = iid_pair(ValuationKind::Additive);
        let grand = Menu { options: vec![MenuOption::deterministic(ItemSet::full(2), 3.0)] };
        assert_abs_diff_eq!(menu_revenue(&d, &grand), 2.25, epsilon = 1e-12);
        assert_eq!(menu_revenue(&d, &Menu::default()), 0.0);
    }

    #[test]
    fn simple_mechanisms_on_iid_pair() {
        let d = iid_pair(ValuationKind::Additive);
        assert_abs_diff_eq!(srev(&d).revenue, 2.0, epsilon = 1e-12);
        let b = brev(&d);
        assert_abs_diff_eq!(b.revenue, 2.25, epsilon = 1e-12);
        assert_eq!(b.price, 3.0);
        let sp = srev_prime(&d);
        assert!(sp.revenue <= 2.0 + 1e-12);
        assert!(sp.revenue >= 1.0 - 1e-12);
        let u = iid_pair(ValuationKind::UnitDemand);
        assert!(srev(&u).revenue >= rev_i(&u, 0).revenue - 1e-12);
    }

    #[test]
    fn lp_revenue_on_iid_pair() {
        let d = iid_pair(ValuationKind::Additive);
        let r = optimal_rev(&d).unwrap();
        assert!(r.revenue >= 2.25 - 1e-9);
        assert!(r.incentive_violation(&d) <= 1e-7);
        assert_eq!(r.type_outcomes.len(), 4);
    }

    #[test]
    fn lp_single_item_is_posted_price() {
        let d = single(vec![1.0, 2.0, 4.0], vec![0.5, 0.25, 0.25]);
        let r = optimal_rev(&d).unwrap();
        assert_abs_diff_eq!(r.revenue, 1.0, epsilon = 1e-9);
        let d = single(vec![1.0, 3.0], vec![0.6, 0.4]);
        assert_abs_diff_eq!(optimal_rev(&d).unwrap().revenue, 1.2, epsilon = 1e-9);
    }

    #[test]
    fn lp_cap_is_enforced() {
        let d = iid_pair(ValuationKind::UnitDemand);
        assert!(matches!(optimal_rev_with_cap(&d, 3), Err(Error::LpTooLarge { .. })));
    }

    #[test]
    fn irrelevant_items_are_dropped() {
        let joint = JointTable::product(&[vec![0.5, 0.5], vec![1.0]]).unwrap();
        let g = SetValuation::unit_demand(vec![vec![1.0, 2.0], vec![0.0]]).unwrap();
        let d = ValuationDistribution::new(joint, g).unwrap();
        let r = optimal_rev(&d).unwrap();
        assert_eq!(r.lp_vars, 2 * 2);
        assert_abs_diff_eq!(r.revenue, 1.0, epsilon = 1e-9);
    }
}
