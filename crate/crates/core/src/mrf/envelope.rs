// SPDX-License-Identifier: Apache-2.0

use super::JointTable;
use crate::error::Result;

/// Product distribution whose coordinate `i` puts mass
/// `min_{w_-i} P(t_i = w | t_-i = w_-i)` on each real state and the leftover
/// on a dummy state (index `radix_i`, the last one).
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub marginals: Vec<Vec<f64>>,
    pub table: JointTable,
}

impl Envelope {
    /// The dummy state's index in coordinate `i`.
    pub fn dummy(&self, i: usize) -> usize {
        self.marginals[i].len() - 1
    }
}

pub fn independent_envelope(joint: &JointTable) -> Result<Envelope> {
    let radices = joint.radices().to_vec();
    let n = radices.len();
    let mut marginals = Vec::with_capacity(n);
    for i in 0..n {
        let k = radices[i];
        let stride = joint.space().stride(i);
        // Group outcomes by t_{-i}: a flat index with digit i zeroed.
        let mut groups: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
        joint.for_each(|s, p| {
            let key = joint.space().encode(s) - s[i] * stride;
            groups.entry(key).or_insert_with(|| vec![0.0; k])[s[i]] += p;
        });
        let mut env = vec![f64::INFINITY; k];
        for row in groups.values() {
            let mass: f64 = row.iter().sum();
            if mass <= 0.0 {
                continue;
            }
            for (e, &p) in env.iter_mut().zip(row) {
                *e = e.min(p / mass);
            }
        }
        if env.iter().any(|e| e.is_infinite()) {
            env.iter_mut().for_each(|e| *e = 0.0);
        }
        let used: f64 = env.iter().sum();
        env.push((1.0 - used).max(0.0));
        marginals.push(env);
    }
    let table = JointTable::product(&marginals)?;
    Ok(Envelope { marginals, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{agreement_potential, numeric_labels, HyperEdge, Mrf};
    use approx::assert_abs_diff_eq;

    #[test]
    fn independent_joint_envelope_is_the_marginals() {
        let marg = vec![vec![0.3, 0.7], vec![0.2, 0.5, 0.3]];
        let env = independent_envelope(&JointTable::product(&marg).unwrap()).unwrap();
        for (e, m) in env.marginals.iter().zip(&marg) {
            for (a, b) in e.iter().zip(m) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(*e.last().unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ln2_pair_envelope() {
        let mrf = Mrf::new(
            vec![numeric_labels(2), numeric_labels(2)],
            vec![vec![0.0; 2]; 2],
            vec![HyperEdge::new(vec![0, 1], agreement_potential(2, 2f64.ln()))],
        )
        .unwrap();
        let env = independent_envelope(&mrf.joint_table().unwrap()).unwrap();
        // conditionals are 0.8 / 0.2 depending on the other coordinate
        assert_abs_diff_eq!(env.marginals[0][1], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(env.marginals[0][0], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(env.marginals[0][env.dummy(0)], 0.6, epsilon = 1e-12);
        let total: f64 = env.table.probs().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}
