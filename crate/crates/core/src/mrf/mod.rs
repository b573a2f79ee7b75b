// SPDX-License-Identifier: Apache-2.0

//! Finite-support Markov random fields.
//!
//! A sample `t` has probability proportional to
//! `exp(sum_i psi_i(t_i) + sum_e psi_e(t_e))`. States are addressed by their
//! index into the vertex's label list; labels carry no numeric meaning.

mod conditioning;
mod envelope;
mod joint;
mod path;

pub use conditioning::{check_conditioning_bounds, ConditioningOptions, ConditioningReport};
pub use envelope::{independent_envelope, Envelope};
pub use joint::{sample, JointTable, DEFAULT_SUPPORT_CAP, NORMALIZATION_TOL};
pub use path::{build_path_mrf, MarkovChain, PathTarget};

use crate::error::{Error, Result};
use crate::space::{advance, ProductSpace};

/// A potential over the joint states of a set of two or more vertices.
///
/// The table is flat, indexed in mixed radix over the members' supports
/// with the first member as the most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperEdge {
    members: Vec<usize>,
    potential: Vec<f64>,
}

impl HyperEdge {
    pub fn new(members: Vec<usize>, potential: Vec<f64>) -> Self {
        Self { members, potential }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    fn flat_index(&self, states: &[usize], radices: &[usize]) -> usize {
        let mut idx = 0;
        for &m in &self.members {
            idx = idx * radices[m] + states[m];
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mrf {
    supports: Vec<Vec<String>>,
    vertex_potentials: Vec<Vec<f64>>,
    edges: Vec<HyperEdge>,
    radices: Vec<usize>,
}

impl Mrf {
    pub fn new(supports: Vec<Vec<String>>, vertex_potentials: Vec<Vec<f64>>, edges: Vec<HyperEdge>) -> Result<Self> {
        let n = supports.len();
        if vertex_potentials.len() != n {
            return Err(Error::InvalidModel(format!("{} vertex potentials for {n} vertices", vertex_potentials.len())));
        }
        for (i, (labels, psi)) in supports.iter().zip(&vertex_potentials).enumerate() {
            if labels.is_empty() {
                return Err(Error::InvalidModel(format!("vertex {i} has an empty support")));
            }
            for (a, la) in labels.iter().enumerate() {
                if labels[..a].contains(la) {
                    return Err(Error::InvalidModel(format!("vertex {i} repeats label {la:?}")));
                }
            }
            if psi.len() != labels.len() {
                return Err(Error::InvalidModel(format!(
                    "vertex {i}: potential has {} entries for {} labels",
                    psi.len(),
                    labels.len()
                )));
            }
            if psi.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidModel(format!("vertex {i}: non-finite potential")));
            }
        }
        let radices: Vec<usize> = supports.iter().map(Vec::len).collect();
        for (k, e) in edges.iter().enumerate() {
            if e.members.len() < 2 {
                return Err(Error::InvalidModel(format!("edge {k} has fewer than two members")));
            }
            for (a, &m) in e.members.iter().enumerate() {
                if m >= n {
                    return Err(Error::InvalidModel(format!("edge {k} references vertex {m}")));
                }
                if e.members[..a].contains(&m) {
                    return Err(Error::InvalidModel(format!("edge {k} repeats vertex {m}")));
                }
            }
            let size: usize = e.members.iter().map(|&m| radices[m]).product();
            if e.potential.len() != size {
                return Err(Error::InvalidModel(format!(
                    "edge {k}: potential has {} entries, expected {size}",
                    e.potential.len()
                )));
            }
            if e.potential.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidModel(format!("edge {k}: non-finite potential")));
            }
        }
        Ok(Self { supports, vertex_potentials, edges, radices })
    }

    /// An MRF with no edges and the given vertex potentials.
    pub fn independent(supports: Vec<Vec<String>>, vertex_potentials: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(supports, vertex_potentials, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn supports(&self) -> &[Vec<String>] {
        &self.supports
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn vertex_potentials(&self) -> &[Vec<f64>] {
        &self.vertex_potentials
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn label_index(&self, vertex: usize, label: &str) -> Option<usize> {
        self.supports.get(vertex)?.iter().position(|l| l == label)
    }

    pub fn edge_value(&self, edge: &HyperEdge, states: &[usize]) -> f64 {
        edge.potential[edge.flat_index(states, &self.radices)]
    }

    /// Unnormalized log-weight of a full outcome.
    pub fn log_weight(&self, states: &[usize]) -> f64 {
        let vertex: f64 = self.vertex_potentials.iter().zip(states).map(|(psi, &s)| psi[s]).sum();
        let edge: f64 = self.edges.iter().map(|e| self.edge_value(e, states)).sum();
        vertex + edge
    }

    pub fn product_space(&self, cap: usize) -> Result<ProductSpace> {
        ProductSpace::new(&self.radices, cap)
    }

    pub fn joint_table(&self) -> Result<JointTable> {
        JointTable::from_mrf(self, DEFAULT_SUPPORT_CAP)
    }

    pub fn joint_table_with_cap(&self, cap: usize) -> Result<JointTable> {
        JointTable::from_mrf(self, cap)
    }

    /// True when the edge set is exactly `{{i-1, i}}` for consecutive vertices.
    pub fn is_path(&self) -> bool {
        let n = self.len();
        if self.edges.len() != n.saturating_sub(1) {
            return false;
        }
        let mut seen = vec![false; n];
        for e in &self.edges {
            let (a, b) = match e.members[..] {
                [a, b] => (a.min(b), a.max(b)),
                _ => return false,
            };
            if b != a + 1 || seen[b] {
                return false;
            }
            seen[b] = true;
        }
        true
    }
}

/// Maximum weighted degree with a vertex and outcome attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub delta: f64,
    pub witness_vertex: usize,
    pub witness_outcome: Vec<usize>,
}

/// `max_i max_s |sum_{e containing i} psi_e(s_e)|`.
///
/// Only the states of vertices sharing an edge with `i` matter, so each
/// vertex enumerates its closed neighbourhood rather than the full support.
pub fn max_weighted_degree(mrf: &Mrf) -> DeltaReport {
    let n = mrf.len();
    let mut best = DeltaReport { delta: 0.0, witness_vertex: 0, witness_outcome: vec![0; n] };
    for i in 0..n {
        let incident: Vec<&HyperEdge> = mrf.edges.iter().filter(|e| e.members.contains(&i)).collect();
        if incident.is_empty() {
            continue;
        }
        let mut hood: Vec<usize> = incident.iter().flat_map(|e| e.members.iter().copied()).collect();
        hood.sort_unstable();
        hood.dedup();
        let radices: Vec<usize> = hood.iter().map(|&v| mrf.radices[v]).collect();
        let mut digits = vec![0usize; hood.len()];
        let mut states = vec![0usize; n];
        loop {
            for (&v, &d) in hood.iter().zip(&digits) {
                states[v] = d;
            }
            let total: f64 = incident.iter().map(|e| mrf.edge_value(e, &states)).sum();
            if total.abs() > best.delta {
                best = DeltaReport { delta: total.abs(), witness_vertex: i, witness_outcome: states.clone() };
            }
            if !advance(&mut digits, &radices) {
                break;
            }
        }
    }
    best
}

/// Labels `"0"`, `"1"`, ... for a support of the given size.
pub fn numeric_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

/// `+beta` when the two endpoints agree, `-beta` otherwise, over `k x k` states.
pub fn agreement_potential(k: usize, beta: f64) -> Vec<f64> {
    (0..k * k).map(|idx| if idx / k == idx % k { beta } else { -beta }).collect()
}
