// SPDX-License-Identifier: Apache-2.0

//! Path-structured MRFs: the anchored potential-selection builder and exact
//! chain inference by backward messages in the log domain.

use super::{HyperEdge, Mrf};
use crate::error::{Error, Result};

/// Target distribution for one vertex of a path.
#[derive(Debug, Clone, PartialEq)]
pub enum PathTarget {
    /// Marginal of the first vertex.
    Initial(Vec<f64>),
    /// `P(t_i = w | t_{i-1} = anchor) = probs[w]`.
    Anchored { anchor: usize, probs: Vec<f64> },
}

impl PathTarget {
    fn probs(&self) -> &[f64] {
        match self {
            PathTarget::Initial(p) | PathTarget::Anchored { probs: p, .. } => p,
        }
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Builds a path MRF with edges `{i-1, i}` whose vertex potentials realize
/// the anchored conditionals.
///
/// `edge_potentials[i - 1]` is the flat `|O_{i-1}| x |O_i|` table of edge
/// `{i-1, i}`. Potentials are fixed from the last vertex backwards: with the
/// downstream partition weight `lambda_w` given the anchor, `psi_i(w) =
/// ln(p_w / lambda_w)`.
pub fn build_path_mrf(
    supports: Vec<Vec<String>>,
    edge_potentials: Vec<Vec<f64>>,
    targets: Vec<PathTarget>,
) -> Result<Mrf> {
    let n = supports.len();
    if n == 0 {
        return Err(Error::InvalidModel("empty path".into()));
    }
    if edge_potentials.len() != n - 1 || targets.len() != n {
        return Err(Error::InvalidModel(format!("path of {n} vertices needs {} edges and {n} targets", n - 1)));
    }
    let radices: Vec<usize> = supports.iter().map(Vec::len).collect();
    for (i, t) in targets.iter().enumerate() {
        let probs = t.probs();
        if probs.len() != radices[i] {
            return Err(Error::InvalidTarget { vertex: i, reason: "length mismatch".into() });
        }
        match (i, t) {
            (0, PathTarget::Anchored { .. }) => {
                return Err(Error::InvalidTarget { vertex: 0, reason: "first vertex has no predecessor".into() })
            }
            (i, PathTarget::Initial(_)) if i > 0 => {
                return Err(Error::InvalidTarget { vertex: i, reason: "needs a predecessor anchor".into() })
            }
            (i, PathTarget::Anchored { anchor, .. }) if *anchor >= radices[i - 1] => {
                return Err(Error::InvalidTarget { vertex: i, reason: format!("anchor {anchor} out of range") })
            }
            _ => {}
        }
        if radices[i] == 1 {
            if (probs[0] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidTarget { vertex: i, reason: "singleton support needs mass 1".into() });
            }
            continue;
        }
        if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::InvalidTarget { vertex: i, reason: "targets must lie strictly inside (0, 1)".into() });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTarget { vertex: i, reason: format!("targets sum to {total}") });
        }
    }
    for (k, e) in edge_potentials.iter().enumerate() {
        if e.len() != radices[k] * radices[k + 1] {
            return Err(Error::InvalidModel(format!("edge {{{k}, {}}} has wrong table size", k + 1)));
        }
    }

    let mut psi: Vec<Vec<f64>> = radices.iter().map(|&r| vec![0.0; r]).collect();
    // log_beta[w]: log partition weight of vertices > i given t_i = w
    let mut log_beta = vec![0.0; radices[n - 1]];
    for i in (0..n).rev() {
        let k = radices[i];
        if k > 1 {
            let log_lambda: Vec<f64> = match &targets[i] {
                PathTarget::Initial(_) => log_beta.clone(),
                PathTarget::Anchored { anchor, .. } => {
                    let e = &edge_potentials[i - 1];
                    (0..k).map(|w| e[anchor * k + w] + log_beta[w]).collect()
                }
            };
            for w in 0..k {
                psi[i][w] = targets[i].probs()[w].ln() - log_lambda[w];
            }
        }
        if i > 0 {
            let prev = radices[i - 1];
            let e = &edge_potentials[i - 1];
            log_beta = (0..prev).map(|a| log_sum_exp((0..k).map(|w| psi[i][w] + e[a * k + w] + log_beta[w]))).collect();
        }
    }

    let edges =
        edge_potentials.into_iter().enumerate().map(|(k, table)| HyperEdge::new(vec![k, k + 1], table)).collect();
    Mrf::new(supports, psi, edges)
}

/// A path MRF rewritten as an inhomogeneous Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    pub initial: Vec<f64>,
    /// `transitions[i][a][b] = P(t_{i+1} = b | t_i = a)`.
    pub transitions: Vec<Vec<Vec<f64>>>,
}

impl MarkovChain {
    /// Exact conversion; works for any path length since it never forms the joint.
    pub fn from_path(mrf: &Mrf) -> Result<Self> {
        if !mrf.is_path() {
            return Err(Error::InvalidModel("not a path MRF".into()));
        }
        let n = mrf.len();
        let radices = mrf.radices();
        // edge_of[i] is the edge {i, i+1}, read as a function of (t_i, t_{i+1})
        let mut edge_of: Vec<Option<&HyperEdge>> = vec![None; n.saturating_sub(1)];
        for e in mrf.edges() {
            let lo = e.members()[0].min(e.members()[1]);
            edge_of[lo] = Some(e);
        }
        let pair_value = |i: usize, a: usize, b: usize| -> f64 {
            let e = edge_of[i].expect("path edge");
            let (ra, rb) = (radices[i], radices[i + 1]);
            if e.members()[0] == i {
                e.potential()[a * rb + b]
            } else {
                e.potential()[b * ra + a]
            }
        };
        let psi = mrf.vertex_potentials();
        let mut log_beta: Vec<Vec<f64>> = vec![Vec::new(); n];
        log_beta[n - 1] = vec![0.0; radices[n - 1]];
        for i in (0..n - 1).rev() {
            log_beta[i] = (0..radices[i])
                .map(|a| {
                    log_sum_exp((0..radices[i + 1]).map(|b| psi[i + 1][b] + pair_value(i, a, b) + log_beta[i + 1][b]))
                })
                .collect();
        }
        let normalize = |logs: Vec<f64>| -> Vec<f64> {
            let z = log_sum_exp(logs.iter().copied());
            logs.iter().map(|l| (l - z).exp()).collect()
        };
        let initial = normalize((0..radices[0]).map(|a| psi[0][a] + log_beta[0][a]).collect());
        let transitions = (0..n - 1)
            .map(|i| {
                (0..radices[i])
                    .map(|a| {
                        normalize(
                            (0..radices[i + 1])
                                .map(|b| psi[i + 1][b] + pair_value(i, a, b) + log_beta[i + 1][b])
                                .collect(),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Self { initial, transitions })
    }

    pub fn len(&self) -> usize {
        self.transitions.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Propagates a (possibly unnormalized) distribution from vertex `i` to `i + 1`.
    pub fn step(&self, i: usize, dist: &[f64]) -> Vec<f64> {
        let t = &self.transitions[i];
        let mut out = vec![0.0; t[0].len()];
        for (a, &m) in dist.iter().enumerate() {
            for (o, &p) in out.iter_mut().zip(&t[a]) {
                *o += m * p;
            }
        }
        out
    }

    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let mut out = vec![self.initial.clone()];
        for i in 0..self.transitions.len() {
            let next = self.step(i, out.last().unwrap());
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{agreement_potential, numeric_labels};
    use approx::assert_abs_diff_eq;

    fn binary_path(n: usize, d0: f64, p: f64) -> Mrf {
        let mut targets = vec![PathTarget::Initial(vec![0.5, 0.5])];
        targets.extend((1..n).map(|_| PathTarget::Anchored { anchor: 1, probs: vec![p, 1.0 - p] }));
        build_path_mrf(vec![numeric_labels(2); n], vec![agreement_potential(2, d0); n - 1], targets).unwrap()
    }

    /// P(t_i = b | t_{i-1} = a) from the exact joint.
    fn joint_conditional(mrf: &Mrf, i: usize, a: usize, b: usize) -> f64 {
        let t = mrf.joint_table().unwrap();
        let num = t.event_prob(|s| s[i - 1] == a && s[i] == b);
        let den = t.event_prob(|s| s[i - 1] == a);
        num / den
    }

    #[test]
    fn zero_coupling_gives_history_free_conditionals() {
        let mrf = binary_path(4, 0.0, 0.3);
        for i in 1..4 {
            assert_abs_diff_eq!(joint_conditional(&mrf, i, 1, 0), 0.3, epsilon = 1e-9);
            assert_abs_diff_eq!(joint_conditional(&mrf, i, 0, 0), 0.3, epsilon = 1e-9);
        }
    }

    #[test]
    fn anchored_conditionals_on_four_vertex_path() {
        let d0 = 0.6;
        let p = 0.35;
        let mrf = binary_path(4, d0, p);
        let t = mrf.joint_table().unwrap();
        assert_abs_diff_eq!(t.marginal(0).unwrap()[0], 0.5, epsilon = 1e-9);
        for i in 1..4 {
            assert_abs_diff_eq!(joint_conditional(&mrf, i, 1, 0), p, epsilon = 1e-9);
            let q = joint_conditional(&mrf, i, 0, 1);
            let odds = (-4.0 * d0).exp() * (1.0 - p) / p;
            assert_abs_diff_eq!(q / (1.0 - q), odds, epsilon = 1e-9);
        }
    }

    #[test]
    fn chain_agrees_with_joint() {
        let mrf = binary_path(5, 0.8, 0.4);
        let chain = MarkovChain::from_path(&mrf).unwrap();
        let t = mrf.joint_table().unwrap();
        for (i, m) in chain.marginals().iter().enumerate() {
            for (a, b) in m.iter().zip(t.marginal(i).unwrap()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
        for i in 1..5 {
            for a in 0..2 {
                for b in 0..2 {
                    assert_abs_diff_eq!(
                        chain.transitions[i - 1][a][b],
                        joint_conditional(&mrf, i, a, b),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn long_paths_stay_finite() {
        let mrf = binary_path(400, 3.0, 0.05);
        let chain = MarkovChain::from_path(&mrf).unwrap();
        for t in &chain.transitions {
            assert_abs_diff_eq!(t[1][0], 0.05, epsilon = 1e-9);
        }
    }

    #[test]
    fn degenerate_targets_are_rejected() {
        let err = build_path_mrf(
            vec![numeric_labels(2); 2],
            vec![agreement_potential(2, 0.1)],
            vec![PathTarget::Initial(vec![0.5, 0.5]), PathTarget::Anchored { anchor: 1, probs: vec![0.0, 1.0] }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTarget { vertex: 1, .. }));
    }
}
