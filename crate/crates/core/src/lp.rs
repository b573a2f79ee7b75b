// SPDX-License-Identifier: Apache-2.0

//! Dense two-phase primal simplex.
//!
//! Problems are `max c.x` subject to rows `a.x (<=|>=|=) b` and `x >= 0`.
//! Pricing is Dantzig's rule; after a run of degenerate pivots it falls back
//! to Bland's rule until the objective moves again, which rules out cycling.
//! Phase two runs on a slightly perturbed right-hand side, then a dual
//! simplex pass restores feasibility for the true one. Every solution
//! carries a dual vector and is rejected unless the primal and dual
//! objectives agree; a rejected basis is refactorized once and reoptimized.

use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const HARRIS_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-10;
const PERTURB: f64 = 1e-7;
const DEGENERATE_STREAK: usize = 50;
const PRIMAL_TOL: f64 = 1e-7;
const GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint, signed for the original row orientation.
    pub duals: Vec<f64>,
    pub dual_objective: f64,
    pub iterations: usize,
    pub max_violation: f64,
    pub max_dual_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP is infeasible (phase-one residual {residual:e})")]
    Infeasible { residual: f64 },
    #[error("LP is unbounded (column {column})")]
    Unbounded { column: usize },
    #[error("simplex exceeded {limit} iterations")]
    IterationLimit { limit: usize },
    #[error("LP certificate failed: primal violation {primal:e}, dual violation {dual:e}, gap {gap:e}")]
    Certificate { primal: f64, dual: f64, gap: f64 },
    #[error("malformed LP: {0}")]
    Malformed(String),
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        Self { objective, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.add(coeffs, Relation::Le, rhs);
    }

    /// Largest amount by which `x` breaks a row or a sign constraint.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0f64, |w, &v| w.max(-v));
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self)?.run(self)
    }
}

struct Tableau {
    m: usize,
    n_orig: usize,
    cols: usize,
    /// Row-major `m x (cols + 2)`. Column `cols` is the working right-hand
    /// side, perturbed during phase two; column `cols + 1` is the true one.
    a: Vec<f64>,
    /// The rows as built, for refactorization.
    orig: Vec<f64>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    /// Column holding the initial unit vector of each row.
    unit_col: Vec<usize>,
    flipped: Vec<bool>,
    iterations: usize,
    limit: usize,
}

impl Tableau {
    fn build(p: &LpProblem) -> Result<Self, LpError> {
        let n = p.num_vars();
        let m = p.constraints.len();
        if let Some(k) = p.constraints.iter().position(|c| c.coeffs.len() != n) {
            return Err(LpError::Malformed(format!("row {k} has the wrong width")));
        }
        if p.objective
            .iter()
            .chain(p.constraints.iter().flat_map(|c| c.coeffs.iter().chain([&c.rhs])))
            .any(|v| !v.is_finite())
        {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        // Normalize to b >= 0, then count the extra columns.
        let mut rows: Vec<(Vec<f64>, Relation, f64, bool)> = Vec::with_capacity(m);
        for c in &p.constraints {
            if c.rhs < 0.0 {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs, true));
            } else {
                rows.push((c.coeffs.clone(), c.relation, c.rhs, false));
            }
        }
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let arts = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let cols = n + slacks + arts;
        let w = cols + 2;
        let mut a = vec![0.0; m * w];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        let mut artificial = vec![false; cols];
        let mut flipped = vec![false; m];
        let (mut s, mut t) = (n, n + slacks);
        for (i, (coeffs, rel, rhs, flip)) in rows.into_iter().enumerate() {
            let row = &mut a[i * w..(i + 1) * w];
            row[..n].copy_from_slice(&coeffs);
            row[cols] = rhs;
            row[cols + 1] = rhs;
            flipped[i] = flip;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis[i] = s;
                    unit_col[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[t] = 1.0;
                    artificial[t] = true;
                    basis[i] = t;
                    unit_col[i] = t;
                    t += 1;
                }
                Relation::Eq => {
                    row[t] = 1.0;
                    artificial[t] = true;
                    basis[i] = t;
                    unit_col[i] = t;
                    t += 1;
                }
            }
        }
        let limit = 50_000 + 20 * (m + cols);
        let orig = a.clone();
        Ok(Self { m, n_orig: n, cols, a, orig, basis, artificial, unit_col, flipped, iterations: 0, limit })
    }

    fn width(&self) -> usize {
        self.cols + 2
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width() + self.cols]
    }

    fn true_rhs(&self, i: usize) -> f64 {
        self.a[i * self.width() + self.cols + 1]
    }

    /// Reduced costs `c_B B^-1 A - c`; the two right-hand-side slots hold the objective.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut d: Vec<f64> = (0..w).map(|j| if j < self.cols { -cost[j] } else { 0.0 }).collect();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * w..(i + 1) * w];
                for (dj, aij) in d.iter_mut().zip(row) {
                    *dj += cb * aij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, d: &mut [f64], r: usize, q: usize) {
        let w = self.width();
        let inv = 1.0 / self.a[r * w + q];
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.a[r * w + q] = 1.0;
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        let f = d[q];
        if f != 0.0 {
            for (v, p) in d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            d[q] = 0.0;
        }
        self.basis[r] = q;
        self.iterations += 1;
    }

    /// Leaving row for entering column `q`, or `None` if the column is unbounded.
    ///
    /// Dantzig mode relaxes the minimum ratio slightly and takes the largest
    /// pivot among the rows it admits; Bland mode takes the exact minimum
    /// with ties broken by the smallest basic index.
    fn ratio_test(&self, q: usize, bland: bool) -> Option<(usize, f64)> {
        let w = self.width();
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            let aiq = self.a[i * w + q];
            if aiq > PIVOT_TOL {
                let slack = if bland { 0.0 } else { HARRIS_TOL };
                bound = bound.min((self.rhs(i).max(0.0) + slack) / aiq);
            }
        }
        if bound == f64::INFINITY {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let aiq = self.a[i * w + q];
            if aiq <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / aiq;
            if bland {
                let tie = |br: f64| (ratio - br).abs() <= 1e-12 * br.abs().max(1.0);
                best = match best {
                    None => Some((i, ratio)),
                    Some((r, br)) if ratio < br && !tie(br) || tie(br) && self.basis[i] < self.basis[r] => {
                        Some((i, ratio))
                    }
                    keep => keep,
                };
            } else if ratio <= bound {
                best = match best {
                    Some((r, _)) if self.a[r * w + q] >= aiq => best,
                    _ => Some((i, ratio)),
                };
            }
        }
        best
    }

    /// Maximizes with reduced costs `d`; columns with `allowed[j] == false` never enter.
    fn optimize(&mut self, d: &mut [f64], allowed: &[bool]) -> Result<(), LpError> {
        let mut bland = false;
        let mut streak = 0;
        loop {
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }
            let candidates = (0..self.cols).filter(|&j| allowed[j] && d[j] < -COST_TOL);
            let q = if bland { candidates.min() } else { candidates.min_by(|&x, &y| d[x].total_cmp(&d[y])) };
            let Some(q) = q else { return Ok(()) };
            let Some((r, ratio)) = self.ratio_test(q, bland) else {
                return Err(LpError::Unbounded { column: q });
            };
            let degenerate = ratio * -d[q] <= 1e-14;
            self.pivot(d, r, q);
            if degenerate {
                streak += 1;
                if streak >= DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
        }
    }

    /// Dual simplex on the true right-hand side from a dual-feasible basis.
    fn restore_primal(&mut self, d: &mut [f64], allowed: &[bool]) -> Result<(), LpError> {
        let w = self.width();
        loop {
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }
            let leave = (0..self.m)
                .filter(|&i| self.true_rhs(i) < -FEAS_TOL)
                .min_by(|&x, &y| self.true_rhs(x).total_cmp(&self.true_rhs(y)));
            let Some(r) = leave else { return Ok(()) };
            let mut best: Option<(usize, f64)> = None;
            for j in (0..self.cols).filter(|&j| allowed[j]) {
                let arj = self.a[r * w + j];
                if arj < -PIVOT_TOL {
                    let ratio = d[j].max(0.0) / -arj;
                    best = match best {
                        Some((q, br)) if br < ratio || br == ratio && self.a[r * w + q] <= arj => best,
                        _ => Some((j, ratio)),
                    };
                }
            }
            let Some((q, _)) = best else {
                return Err(LpError::Infeasible { residual: -self.true_rhs(r) });
            };
            self.pivot(d, r, q);
        }
    }

    /// Rebuilds `B^-1 [A | b]` from the original rows for the current basis.
    fn refactor(&mut self) -> Result<(), LpError> {
        let w = self.width();
        let mut a = self.orig.clone();
        let cols: Vec<usize> = self.basis.clone();
        let mut used = vec![false; self.m];
        let mut basis = vec![usize::MAX; self.m];
        for &q in &cols {
            let r = (0..self.m)
                .filter(|&i| !used[i])
                .max_by(|&x, &y| a[x * w + q].abs().total_cmp(&a[y * w + q].abs()))
                .filter(|&r| a[r * w + q].abs() > PIVOT_TOL)
                .ok_or_else(|| LpError::Malformed("singular basis on refactorization".into()))?;
            used[r] = true;
            basis[r] = q;
            let inv = 1.0 / a[r * w + q];
            for v in &mut a[r * w..(r + 1) * w] {
                *v *= inv;
            }
            let prow: Vec<f64> = a[r * w..(r + 1) * w].to_vec();
            for i in (0..self.m).filter(|&i| i != r) {
                let f = a[i * w + q];
                if f != 0.0 {
                    for (v, p) in a[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                        *v -= f * p;
                    }
                }
            }
        }
        self.a = a;
        self.basis = basis;
        Ok(())
    }

    /// Phase two from the current basis, ending primal feasible on the true right-hand side.
    fn phase_two(&mut self, p: &LpProblem, allowed: &[bool]) -> Result<Vec<f64>, LpError> {
        let w = self.width();
        let mut cost = vec![0.0; self.cols];
        cost[..self.n_orig].copy_from_slice(&p.objective);
        // Positive perturbation of the basic values removes most degeneracy.
        for i in 0..self.m {
            let b = self.true_rhs(i).max(0.0);
            let jitter = PERTURB * (1.0 + b) * (1.0 + ((i * 7919) % 97) as f64 / 97.0);
            self.a[i * w + self.cols] = b + jitter;
        }
        let mut d = self.reduced_costs(&cost);
        self.optimize(&mut d, allowed)?;
        self.restore_primal(&mut d, allowed)?;
        Ok(d)
    }

    fn run(mut self, p: &LpProblem) -> Result<LpSolution, LpError> {
        let w = self.width();
        let any_artificial = self.artificial.iter().any(|&b| b);
        if any_artificial {
            let cost: Vec<f64> = self.artificial.iter().map(|&art| if art { -1.0 } else { 0.0 }).collect();
            let mut d = self.reduced_costs(&cost);
            let allowed = vec![true; self.cols];
            self.optimize(&mut d, &allowed)?;
            let scale = p.constraints.iter().fold(1.0f64, |s, c| s.max(c.rhs.abs()));
            let residual = -d[self.cols + 1];
            if residual > 1e-9 * scale {
                return Err(LpError::Infeasible { residual });
            }
            // Drive remaining artificials out; rows with no other support are redundant.
            for r in 0..self.m {
                if self.artificial[self.basis[r]] {
                    let q = (0..self.cols)
                        .filter(|&j| !self.artificial[j])
                        .max_by(|&x, &y| self.a[r * w + x].abs().total_cmp(&self.a[r * w + y].abs()));
                    if let Some(q) = q.filter(|&q| self.a[r * w + q].abs() > 1e-7) {
                        self.pivot(&mut d, r, q);
                    }
                }
            }
        }
        let allowed: Vec<bool> = self.artificial.iter().map(|&b| !b).collect();
        let mut d = self.phase_two(p, &allowed)?;
        let mut sol = self.extract(p, &d);
        if sol.is_err() {
            self.refactor()?;
            d = self.phase_two(p, &allowed)?;
            sol = self.extract(p, &d);
        }
        sol
    }

    fn extract(&self, p: &LpProblem, d: &[f64]) -> Result<LpSolution, LpError> {
        let mut x = vec![0.0; self.n_orig];
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.n_orig {
                x[b] = self.true_rhs(i).max(0.0);
            }
        }
        let objective: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals: Vec<f64> = (0..self.m)
            .map(|i| {
                let y = d[self.unit_col[i]];
                if self.flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        let dual_objective: f64 = p.constraints.iter().zip(&duals).map(|(c, y)| c.rhs * y).sum();
        let max_violation = p.violation(&x);
        let max_dual_violation = dual_violation(p, &duals);
        let scale = objective.abs().max(1.0);
        let gap = (dual_objective - objective).abs() / scale;
        let cscale = p.objective.iter().fold(1.0f64, |s, c| s.max(c.abs()));
        if max_violation > PRIMAL_TOL || gap > GAP_TOL || max_dual_violation > GAP_TOL * cscale {
            return Err(LpError::Certificate { primal: max_violation, dual: max_dual_violation, gap });
        }
        Ok(LpSolution {
            x,
            objective,
            duals,
            dual_objective,
            iterations: self.iterations,
            max_violation,
            max_dual_violation,
        })
    }
}

/// Violation of `A^T y >= c` and the sign conditions on `y`.
fn dual_violation(p: &LpProblem, y: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (c, &yi) in p.constraints.iter().zip(y) {
        worst = worst.max(match c.relation {
            Relation::Le => -yi,
            Relation::Ge => yi,
            Relation::Eq => 0.0,
        });
    }
    for j in 0..p.num_vars() {
        let aty: f64 = p.constraints.iter().zip(y).map(|(c, yi)| c.coeffs[j] * yi).sum();
        worst = worst.max(p.objective[j] - aty);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_bound() {
        let mut p = LpProblem::new(vec![1.0]);
        p.le(vec![1.0], 1.0);
        let s = p.solve().unwrap();
        assert_abs_diff_eq!(s.objective, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.duals[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut p = LpProblem::new(vec![3.0, 5.0]);
        p.le(vec![1.0, 0.0], 4.0);
        p.le(vec![0.0, 2.0], 12.0);
        p.le(vec![3.0, 2.0], 18.0);
        let s = p.solve().unwrap();
        assert_abs_diff_eq!(s.objective, 36.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.x[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.x[1], 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.dual_objective, 36.0, epsilon = 1e-9);
    }

    #[test]
    fn equality_only_system() {
        let mut p = LpProblem::new(vec![0.0, 0.0, 0.0]);
        p.add(vec![1.0, 1.0, 0.0], Relation::Eq, 1.0);
        p.add(vec![2.0, 2.0, 0.0], Relation::Eq, 2.0);
        p.add(vec![0.0, 1.0, 1.0], Relation::Eq, 0.5);
        let s = p.solve().unwrap();
        assert!(p.violation(&s.x) <= 1e-9);
    }

    #[test]
    fn ge_rows_and_negative_rhs() {
        // min x + y (as max -x - y) s.t. x + 2y >= 4, -x <= -1
        let mut p = LpProblem::new(vec![-1.0, -1.0]);
        p.add(vec![1.0, 2.0], Relation::Ge, 4.0);
        p.le(vec![-1.0, 0.0], -1.0);
        let s = p.solve().unwrap();
        assert_abs_diff_eq!(s.objective, -2.5, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded_are_distinct() {
        let mut p = LpProblem::new(vec![1.0]);
        p.le(vec![1.0], 1.0);
        p.add(vec![1.0], Relation::Ge, 2.0);
        assert!(matches!(p.solve(), Err(LpError::Infeasible { .. })));

        let mut p = LpProblem::new(vec![1.0, 0.0]);
        p.le(vec![0.0, 1.0], 1.0);
        assert!(matches!(p.solve(), Err(LpError::Unbounded { column: 0 })));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under naive Dantzig pricing.
        let mut p = LpProblem::new(vec![0.75, -150.0, 0.02, -6.0]);
        p.le(vec![0.25, -60.0, -0.04, 9.0], 0.0);
        p.le(vec![0.5, -90.0, -0.02, 3.0], 0.0);
        p.le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let s = p.solve().unwrap();
        assert_abs_diff_eq!(s.objective, 0.05, epsilon = 1e-9);
    }
}
