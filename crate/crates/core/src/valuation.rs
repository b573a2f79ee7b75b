// SPDX-License-Identifier: Apache-2.0

//! Set-function valuations over typed items and the buyer distributions built
//! from them.
//!
//! A typed set assigns each item either no type (`None`) or one state index.
//! States at or beyond an item's radix are dummy states and count as absent,
//! which lets the same valuation run over the independent envelope.

use std::fmt;

use crate::error::{Error, Result};
use crate::mrf::JointTable;
use crate::space::{advance, ProductSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValuationKind {
    Additive,
    UnitDemand,
    SubadditiveTable,
}

impl ValuationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValuationKind::Additive => "additive",
            ValuationKind::UnitDemand => "unit_demand",
            ValuationKind::SubadditiveTable => "subadditive_table",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "additive" => Some(ValuationKind::Additive),
            "unit_demand" => Some(ValuationKind::UnitDemand),
            "subadditive_table" | "subadditive" => Some(ValuationKind::SubadditiveTable),
            _ => None,
        }
    }
}

impl fmt::Display for ValuationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bitmask of items; item `i` is bit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ItemSet(pub u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n < 64);
        ItemSet((1u64 << n) - 1)
    }

    pub fn single(i: usize) -> Self {
        ItemSet(1 << i)
    }

    pub fn from_items(items: impl IntoIterator<Item = usize>) -> Self {
        ItemSet(items.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        ItemSet(self.0 | o.0)
    }

    pub fn intersect(self, o: Self) -> Self {
        ItemSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        ItemSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// All subsets of `self`, including the empty set, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = ItemSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(ItemSet(cur))
        })
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetValuation {
    kind: ValuationKind,
    /// `singleton[i][w] = g({(i, w)})`.
    singleton: Vec<Vec<f64>>,
    /// Mixed radix over `radix_i + 1` digits; digit 0 is "absent".
    table: Option<Vec<f64>>,
}

/// Outcome of an exhaustive class check.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub pass: bool,
    pub violation: Option<String>,
}

impl SetValuation {
    pub fn additive(singleton: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_singletons(ValuationKind::Additive, singleton)
    }

    pub fn unit_demand(singleton: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_singletons(ValuationKind::UnitDemand, singleton)
    }

    fn from_singletons(kind: ValuationKind, singleton: Vec<Vec<f64>>) -> Result<Self> {
        if singleton.iter().any(Vec::is_empty) {
            return Err(Error::Valuation("item with empty support".into()));
        }
        if singleton.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Valuation("singleton values must be finite and nonnegative".into()));
        }
        Ok(Self { kind, singleton, table: None })
    }

    /// A table valuation; `table` is indexed as described on [`SetValuation::table_index`].
    pub fn subadditive_table(radices: &[usize], table: Vec<f64>) -> Result<Self> {
        let size: usize = radices.iter().map(|r| r + 1).product();
        if table.len() != size {
            return Err(Error::Valuation(format!("table has {} entries, expected {size}", table.len())));
        }
        if table.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Valuation("table values must be finite and nonnegative".into()));
        }
        if table[0] != 0.0 {
            return Err(Error::Valuation("value of the empty set must be 0".into()));
        }
        let mut g = Self { kind: ValuationKind::SubadditiveTable, singleton: Vec::new(), table: Some(table) };
        g.singleton = radices
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                (0..r)
                    .map(|w| {
                        let mut typed = vec![None; radices.len()];
                        typed[i] = Some(w);
                        g.table_value(radices, &typed)
                    })
                    .collect()
            })
            .collect();
        Ok(g)
    }

    /// Builds a table valuation by evaluating `f` on every typed set.
    pub fn tabulate(radices: &[usize], mut f: impl FnMut(&[Option<usize>]) -> f64) -> Result<Self> {
        let ext: Vec<usize> = radices.iter().map(|r| r + 1).collect();
        let mut table = Vec::with_capacity(ext.iter().product());
        let mut digits = vec![0usize; ext.len()];
        let mut typed = vec![None; ext.len()];
        loop {
            for (t, &d) in typed.iter_mut().zip(&digits) {
                *t = d.checked_sub(1);
            }
            table.push(f(&typed));
            if !advance(&mut digits, &ext) {
                break;
            }
        }
        Self::subadditive_table(radices, table)
    }

    pub fn kind(&self) -> ValuationKind {
        self.kind
    }

    pub fn num_items(&self) -> usize {
        self.singleton.len()
    }

    pub fn radices(&self) -> Vec<usize> {
        self.singleton.iter().map(Vec::len).collect()
    }

    pub fn singletons(&self) -> &[Vec<f64>] {
        &self.singleton
    }

    pub fn table(&self) -> Option<&[f64]> {
        self.table.as_deref()
    }

    /// `g({(i, w)})`, or 0 for a dummy state.
    pub fn singleton(&self, i: usize, w: usize) -> f64 {
        self.singleton[i].get(w).copied().unwrap_or(0.0)
    }

    /// Flat table position of a typed set: digit `i` is 0 when absent, `w + 1` otherwise.
    pub fn table_index(radices: &[usize], typed: &[Option<usize>]) -> usize {
        typed.iter().zip(radices).fold(0, |idx, (t, &r)| idx * (r + 1) + t.map_or(0, |w| w + 1))
    }

    fn table_value(&self, radices: &[usize], typed: &[Option<usize>]) -> f64 {
        let t = self.table.as_ref().expect("table valuation");
        t[Self::table_index(radices, typed)]
    }

    /// `g` of a typed set. Entries beyond an item's radix are treated as absent.
    pub fn value(&self, typed: &[Option<usize>]) -> Result<f64> {
        if typed.len() != self.num_items() {
            return Err(Error::Valuation(format!(
                "typed set has {} items, expected {}",
                typed.len(),
                self.num_items()
            )));
        }
        Ok(self.value_unchecked(typed))
    }

    fn value_unchecked(&self, typed: &[Option<usize>]) -> f64 {
        let present = typed
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.and_then(|w| (w < self.singleton[i].len()).then_some((i, w))));
        match self.kind {
            ValuationKind::Additive => present.map(|(i, w)| self.singleton[i][w]).sum(),
            ValuationKind::UnitDemand => present.map(|(i, w)| self.singleton[i][w]).fold(0.0, f64::max),
            ValuationKind::SubadditiveTable => {
                let radices = self.radices();
                let clean: Vec<Option<usize>> =
                    typed.iter().enumerate().map(|(i, t)| t.filter(|&w| w < radices[i])).collect();
                self.table_value(&radices, &clean)
            }
        }
    }

    /// Exhaustive check of `g(empty) = 0`, monotonicity and subadditivity.
    pub fn validate_class(&self) -> ClassReport {
        let radices = self.radices();
        let n = radices.len();
        let ext: Vec<usize> = radices.iter().map(|r| r + 1).collect();
        let space = match ProductSpace::new(&ext, 1 << 22) {
            Ok(s) => s,
            Err(e) => return ClassReport { pass: false, violation: Some(e.to_string()) },
        };
        let typed_of = |digits: &[usize]| -> Vec<Option<usize>> { digits.iter().map(|d| d.checked_sub(1)).collect() };
        let values: Vec<f64> = {
            let mut v = Vec::with_capacity(space.len());
            space.for_each(|_, d| v.push(self.value_unchecked(&typed_of(d))));
            v
        };
        let fail = |msg: String| ClassReport { pass: false, violation: Some(msg) };
        if values[0] != 0.0 {
            return fail(format!("g(empty) = {}", values[0]));
        }
        let tol = |x: f64| 1e-12 * x.abs().max(1.0);
        let mut a = vec![0usize; n];
        for ia in 0..space.len() {
            space.decode_into(ia, &mut a);
            // Monotone along every single-item extension.
            for i in 0..n {
                if a[i] == 0 {
                    for w in 1..ext[i] {
                        let ib = ia + w * space.stride(i);
                        if values[ia] > values[ib] + tol(values[ib]) {
                            return fail(format!(
                                "not monotone: g({:?}) = {} > g({:?}) = {}",
                                typed_of(&a),
                                values[ia],
                                typed_of(&space.decode(ib)),
                                values[ib]
                            ));
                        }
                    }
                }
            }
        }
        let mut b = vec![0usize; n];
        for ia in 0..space.len() {
            space.decode_into(ia, &mut a);
            for ib in ia..space.len() {
                space.decode_into(ib, &mut b);
                if a.iter().zip(&b).any(|(&x, &y)| x != 0 && y != 0 && x != y) {
                    continue;
                }
                let u: Vec<usize> = a.iter().zip(&b).map(|(&x, &y)| x.max(y)).collect();
                let vu = values[space.encode(&u)];
                let rhs = values[ia] + values[ib];
                if vu > rhs + tol(rhs) {
                    return fail(format!(
                        "not subadditive: g({:?}) = {vu} > g({:?}) + g({:?}) = {rhs}",
                        typed_of(&u),
                        typed_of(&a),
                        typed_of(&b)
                    ));
                }
            }
        }
        ClassReport { pass: true, violation: None }
    }
}

/// Which singleton values an item may have to count toward `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueWindow {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl ValueWindow {
    /// `[cut, inf)`: the tail.
    pub fn at_least(cut: f64) -> Self {
        Self { lo: cut, lo_closed: true, hi: f64::INFINITY, hi_closed: true }
    }

    /// `[0, cut)`: the core.
    pub fn below(cut: f64) -> Self {
        Self { lo: 0.0, lo_closed: true, hi: cut, hi_closed: false }
    }

    /// `[0, r]`.
    pub fn at_most(r: f64) -> Self {
        Self { lo: 0.0, lo_closed: true, hi: r, hi_closed: true }
    }

    /// `(r, cut)`.
    pub fn between(r: f64, cut: f64) -> Self {
        Self { lo: r, lo_closed: false, hi: cut, hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

/// A joint type distribution with a valuation, the items in play and an
/// optional per-item window on singleton values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationDistribution {
    joint: JointTable,
    g: SetValuation,
    items: ItemSet,
    window: Option<ValueWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoReport {
    pub rho: f64,
    /// Positive-probability `(outcome, j)` pairs skipped for a zero denominator.
    pub skipped: usize,
}

impl ValuationDistribution {
    /// Each joint coordinate must have the valuation's radix, or one more
    /// (a trailing dummy state).
    pub fn new(joint: JointTable, g: SetValuation) -> Result<Self> {
        let gr = g.radices();
        let jr = joint.radices();
        if gr.len() != jr.len() {
            return Err(Error::Valuation(format!("{} items for {} coordinates", gr.len(), jr.len())));
        }
        if gr.len() >= 64 {
            return Err(Error::Valuation("at most 63 items".into()));
        }
        for (i, (&a, &b)) in gr.iter().zip(jr).enumerate() {
            if b != a && b != a + 1 {
                return Err(Error::Valuation(format!("item {i}: {a} valuation states for {b} joint states")));
            }
        }
        let items = ItemSet::full(gr.len());
        Ok(Self { joint, g, items, window: None })
    }

    pub fn joint(&self) -> &JointTable {
        &self.joint
    }

    pub fn valuation(&self) -> &SetValuation {
        &self.g
    }

    pub fn kind(&self) -> ValuationKind {
        self.g.kind()
    }

    pub fn num_items(&self) -> usize {
        self.g.num_items()
    }

    pub fn items(&self) -> ItemSet {
        self.items
    }

    pub fn window(&self) -> Option<ValueWindow> {
        self.window
    }

    /// Same joint, only `s` in play.
    pub fn restrict(&self, s: ItemSet) -> Result<Self> {
        if !s.is_subset(self.items) {
            return Err(Error::Valuation(format!("{s} is not a subset of the items in play {}", self.items)));
        }
        Ok(Self { items: s, ..self.clone() })
    }

    /// Counts an item only when its singleton value lies in `w`.
    pub fn with_window(&self, w: ValueWindow) -> Self {
        Self { window: Some(w), ..self.clone() }
    }

    pub fn with_joint(&self, joint: JointTable) -> Result<Self> {
        let mut d = Self::new(joint, self.g.clone())?;
        d.items = self.items;
        d.window = self.window;
        Ok(d)
    }

    /// `g({(i, s_i)})`, or 0 when `s_i` is a dummy state.
    pub fn singleton(&self, i: usize, s: &[usize]) -> f64 {
        self.g.singleton(i, s[i])
    }

    fn counts(&self, i: usize, s: &[usize]) -> bool {
        self.items.contains(i) && self.window.is_none_or(|w| w.contains(self.g.singleton(i, s[i])))
    }

    /// `v_s(set)`: items outside play or outside the window contribute nothing.
    pub fn value(&self, s: &[usize], set: ItemSet) -> f64 {
        let typed: Vec<Option<usize>> =
            (0..s.len()).map(|i| (set.contains(i) && self.counts(i, s)).then_some(s[i])).collect();
        self.g.value_unchecked(&typed)
    }

    /// `v_s` of the items in play.
    pub fn value_all(&self, s: &[usize]) -> f64 {
        self.value(s, self.items)
    }

    /// `v_s({i})` with the window applied.
    pub fn item_value(&self, s: &[usize], i: usize) -> f64 {
        if self.counts(i, s) {
            self.g.singleton(i, s[i])
        } else {
            0.0
        }
    }

    /// `{i in play : g(s_i) >= cut}`.
    pub fn tail_set(&self, s: &[usize], cut: f64) -> ItemSet {
        ItemSet::from_items(self.items.iter().filter(|&i| self.g.singleton(i, s[i]) >= cut))
    }

    /// Conditions the joint on the tail set being exactly `a`.
    pub fn condition_on_tail(&self, cut: f64, a: ItemSet) -> Result<Self> {
        let joint = self.joint.conditional(|s| self.tail_set(s, cut) == a)?;
        Ok(Self { joint, ..self.clone() })
    }

    /// `E[v(items in play)]`.
    pub fn val(&self) -> f64 {
        self.joint.expectation(|s| self.value_all(s))
    }

    /// Exact distribution of `v_s(set)` as sorted `(value, probability)` pairs.
    pub fn value_distribution(&self, set: ItemSet) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        self.joint.for_each_positive(|s, p| pts.push((self.value(s, set), p)));
        merge_points(pts)
    }

    /// Distribution of the windowed singleton value of item `i`.
    pub fn item_distribution(&self, i: usize) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        self.joint.for_each_positive(|s, p| pts.push((self.item_value(s, i), p)));
        merge_points(pts)
    }

    /// `max_j max_s v_s(items - j) / max_{i != j} v_s({i})` over positive-probability outcomes.
    pub fn rho(&self) -> Result<RhoReport> {
        if self.items.len() < 2 {
            return Err(Error::Valuation("rho needs at least two items".into()));
        }
        let mut rho: Option<f64> = None;
        let mut skipped = 0;
        self.joint.for_each_positive(|s, _| {
            for j in self.items.iter() {
                let rest = self.items.minus(ItemSet::single(j));
                let den = rest.iter().map(|i| self.item_value(s, i)).fold(0.0, f64::max);
                if den <= 0.0 {
                    skipped += 1;
                    continue;
                }
                let r = self.value(s, rest) / den;
                rho = Some(rho.map_or(r, |x: f64| x.max(r)));
            }
        });
        rho.map(|rho| RhoReport { rho, skipped }).ok_or(Error::UndefinedRatio)
    }
}

/// Sorts by value and merges equal values.
pub fn merge_points(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (v, p) in pts {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => out.push((v, p)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{agreement_potential, numeric_labels, HyperEdge, Mrf};
    use approx::assert_abs_diff_eq;

    fn iid_uniform_12(g: fn(Vec<Vec<f64>>) -> Result<SetValuation>) -> ValuationDistribution {
        let joint = JointTable::product(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        ValuationDistribution::new(joint, g(vec![vec![1.0, 2.0]; 2]).unwrap()).unwrap()
    }

    #[test]
    fn class_values() {
        let add = SetValuation::additive(vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(add.value(&[Some(0), Some(0)]).unwrap(), 3.0);
        let ud = SetValuation::unit_demand(vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(ud.value(&[Some(0), Some(0)]).unwrap(), 2.0);
        let tab = SetValuation::subadditive_table(&[1, 1], vec![0.0, 2.0, 1.0, 2.5]).unwrap();
        assert_eq!(tab.value(&[Some(0), Some(0)]).unwrap(), 2.5);
        assert_eq!(tab.value(&[Some(0), None]).unwrap(), 1.0);
        assert_eq!(tab.singletons(), &[vec![1.0], vec![2.0]]);
    }

    #[test]
    fn class_validation() {
        let s = vec![vec![1.0, 3.0], vec![0.5, 2.0]];
        assert!(SetValuation::additive(s.clone()).unwrap().validate_class().pass);
        assert!(SetValuation::unit_demand(s).unwrap().validate_class().pass);
        let bad = SetValuation::subadditive_table(&[1, 1], vec![0.0, 1.0, 1.0, 3.0]).unwrap();
        let rep = bad.validate_class();
        assert!(!rep.pass);
        assert!(rep.violation.unwrap().contains("subadditive"));
        let non_monotone = SetValuation::subadditive_table(&[1, 1], vec![0.0, 1.0, 1.0, 0.5]).unwrap();
        assert!(non_monotone.validate_class().violation.unwrap().contains("monotone"));
    }

    #[test]
    fn val_of_iid_uniform_pair() {
        assert_abs_diff_eq!(iid_uniform_12(SetValuation::additive).val(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(iid_uniform_12(SetValuation::unit_demand).val(), 1.75, epsilon = 1e-12);
        let d = iid_uniform_12(SetValuation::additive);
        assert_eq!(d.restrict(ItemSet::EMPTY).unwrap().val(), 0.0);
        assert_abs_diff_eq!(d.restrict(ItemSet::single(0)).unwrap().val(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn rho_values() {
        assert_abs_diff_eq!(iid_uniform_12(SetValuation::unit_demand).rho().unwrap().rho, 1.0, epsilon = 1e-12);
        let joint = JointTable::product(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let d = ValuationDistribution::new(joint, SetValuation::additive(vec![vec![2.0]; 3]).unwrap()).unwrap();
        assert_abs_diff_eq!(d.rho().unwrap().rho, 2.0, epsilon = 1e-12);
        let joint = JointTable::product(&[vec![1.0], vec![1.0]]).unwrap();
        let zero = ValuationDistribution::new(joint, SetValuation::additive(vec![vec![0.0]; 2]).unwrap()).unwrap();
        assert_eq!(zero.rho(), Err(Error::UndefinedRatio));
    }

    #[test]
    fn tail_conditioning() {
        let mrf = Mrf::new(
            vec![numeric_labels(2), numeric_labels(2)],
            vec![vec![0.0; 2]; 2],
            vec![HyperEdge::new(vec![0, 1], agreement_potential(2, 2f64.ln()))],
        )
        .unwrap();
        let d = ValuationDistribution::new(
            mrf.joint_table().unwrap(),
            SetValuation::additive(vec![vec![1.0, 5.0]; 2]).unwrap(),
        )
        .unwrap();
        // Only item 0 high: outcome (1, 0) alone.
        let c = d.condition_on_tail(5.0, ItemSet::single(0)).unwrap();
        assert_abs_diff_eq!(c.joint().prob(&[1, 0]), 1.0, epsilon = 1e-12);
        // T = {0, 1} has Pr 0.4; T = {} has 0.4.
        let both = d.condition_on_tail(3.0, ItemSet::full(2)).unwrap();
        assert_abs_diff_eq!(both.joint().prob(&[1, 1]), 1.0, epsilon = 1e-12);
        let none = d.condition_on_tail(100.0, ItemSet::EMPTY).unwrap();
        assert_eq!(none.joint(), d.joint());
        let all = d.condition_on_tail(0.0, ItemSet::full(2)).unwrap();
        assert_eq!(all.joint(), d.joint());
        assert!(d.condition_on_tail(100.0, ItemSet::single(1)).is_err());
    }

    #[test]
    fn windows_filter_items() {
        let d = iid_uniform_12(SetValuation::additive);
        assert_abs_diff_eq!(d.with_window(ValueWindow::at_least(2.0)).val(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.with_window(ValueWindow::below(2.0)).val(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.with_window(ValueWindow::between(1.0, 2.0)).val(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.with_window(ValueWindow::at_most(1.0)).val(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dummy_states_are_absent() {
        let joint = JointTable::product(&[vec![0.5, 0.5], vec![0.25, 0.75]]).unwrap();
        let g = SetValuation::additive(vec![vec![3.0], vec![4.0]]).unwrap();
        let d = ValuationDistribution::new(joint, g).unwrap();
        assert_abs_diff_eq!(d.val(), 1.5 + 1.0, epsilon = 1e-12);
    }

    #[test]
    fn subsets_enumeration() {
        let s = ItemSet::from_items([0, 2]);
        let all: Vec<u64> = s.subsets().map(|x| x.0).collect();
        assert_eq!(all, vec![0, 1, 4, 5]);
        assert_eq!(ItemSet::EMPTY.subsets().count(), 1);
    }
}
