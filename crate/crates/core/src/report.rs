// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// Slack allowed on `lhs <= rhs`, relative to `max(1, |rhs|)`.
pub const BOUND_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    /// `lhs <= rhs` up to a relative tolerance.
    Le,
    /// `|lhs - rhs| <= tol * max(1, |rhs|)`.
    Eq { tol: f64 },
}

/// One numeric inequality or identity evaluated on an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub relation: Relation,
    /// What realizes the lhs: a split, a price, a threshold.
    pub witness: String,
}

impl BoundReport {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, witness: impl Into<String>) -> Self {
        Self::le_tol(name, lhs, rhs, BOUND_TOL, witness)
    }

    /// `lhs <= rhs + tol * max(1, |rhs|)`.
    pub fn le_tol(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, witness: impl Into<String>) -> Self {
        let pass = lhs <= rhs + tol * rhs.abs().max(1.0);
        Self { name: name.into(), lhs, rhs, slack: rhs - lhs, pass, relation: Relation::Le, witness: witness.into() }
    }

    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, witness: impl Into<String>) -> Self {
        let pass = (lhs - rhs).abs() <= tol * rhs.abs().max(1.0);
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass,
            relation: Relation::Eq { tol },
            witness: witness.into(),
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::Le => "<=",
            Relation::Eq { .. } => "==",
        };
        write!(
            f,
            "{} {}: {} {op} {} (slack {}) {}",
            if self.pass { "ok  " } else { "FAIL" },
            self.name,
            self.lhs,
            self.rhs,
            self.slack,
            self.witness
        )
    }
}
