// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mrf;
use crate::error::{Error, Result};
use crate::space::ProductSpace;

/// Default cap on the number of outcomes in a product support.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

/// Absolute tolerance on the total probability mass.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Exact probability table over the full product support.
///
/// Zero-probability outcomes stay in the table (after conditioning, for
/// instance) so that every table shares the indexing of its support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    space: ProductSpace,
    probs: Vec<f64>,
}

impl JointTable {
    /// Normalized table from an MRF via max-shifted log-sum-exp.
    pub fn from_mrf(mrf: &Mrf, cap: usize) -> Result<Self> {
        let space = mrf.product_space(cap)?;
        let mut logw = vec![0.0; space.len()];
        space.for_each(|idx, states| logw[idx] = mrf.log_weight(states));
        Ok(Self::from_log_weights(space, logw))
    }

    pub(crate) fn from_log_weights(space: ProductSpace, logw: Vec<f64>) -> Self {
        let shift = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logw.iter().map(|w| (w - shift).exp()).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        Self { space, probs }
    }

    /// Table from explicit probabilities; validates nonnegativity and mass.
    pub fn from_probs(radices: &[usize], probs: Vec<f64>) -> Result<Self> {
        let space = ProductSpace::new(radices, usize::MAX)?;
        if probs.len() != space.len() {
            return Err(Error::InvalidModel(format!("{} probabilities for a support of {}", probs.len(), space.len())));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidModel("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}")));
        }
        Ok(Self { space, probs })
    }

    /// Product of independent per-coordinate distributions.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let radices: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let space = ProductSpace::new(&radices, usize::MAX)?;
        let mut probs = vec![0.0; space.len()];
        space.for_each(|idx, states| {
            probs[idx] = marginals.iter().zip(states).map(|(m, &s)| m[s]).product();
        });
        Self::from_probs(&radices, probs)
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn radices(&self) -> &[usize] {
        self.space.radices()
    }

    /// Number of coordinates.
    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, states: &[usize]) -> f64 {
        self.probs[self.space.encode(states)]
    }

    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        self.space.for_each(|idx, states| f(states, self.probs[idx]));
    }

    /// Visits outcomes with strictly positive probability.
    pub fn for_each_positive(&self, mut f: impl FnMut(&[usize], f64)) {
        self.space.for_each(|idx, states| {
            let p = self.probs[idx];
            if p > 0.0 {
                f(states, p)
            }
        });
    }

    pub fn expectation(&self, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_positive(|s, p| acc += p * f(s));
        acc
    }

    pub fn event_prob(&self, mut event: impl FnMut(&[usize]) -> bool) -> f64 {
        let mut acc = 0.0;
        self.for_each_positive(|s, p| {
            if event(s) {
                acc += p
            }
        });
        acc
    }

    /// Exact marginal of coordinate `i`.
    pub fn marginal(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.dims() {
            return Err(Error::IndexOutOfRange { index: i, len: self.dims() });
        }
        let mut out = vec![0.0; self.radices()[i]];
        self.for_each(|s, p| out[s[i]] += p);
        Ok(out)
    }

    /// Restriction to `event`, renormalized; the support is unchanged.
    pub fn conditional(&self, mut event: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let mut probs = vec![0.0; self.len()];
        let mut mass = 0.0;
        self.space.for_each(|idx, s| {
            if self.probs[idx] > 0.0 && event(s) {
                probs[idx] = self.probs[idx];
                mass += self.probs[idx];
            }
        });
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvent);
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Ok(Self { space: self.space.clone(), probs })
    }

    /// Same distribution with coordinates listed in `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let radices: Vec<usize> = order.iter().map(|&i| self.radices()[i]).collect();
        let space = ProductSpace::new(&radices, usize::MAX)?;
        let mut probs = vec![0.0; self.len()];
        let mut target = vec![0usize; order.len()];
        self.for_each(|s, p| {
            for (k, &i) in order.iter().enumerate() {
                target[k] = s[i];
            }
            probs[space.encode(&target)] = p;
        });
        Ok(Self { space, probs })
    }

    /// Exact inverse-CDF draw; deterministic for a given seed.
    pub fn sample(&self, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (idx, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last_positive = idx;
            if u < acc {
                return self.space.decode(idx);
            }
        }
        self.space.decode(last_positive)
    }
}

/// Draws a type vector from the MRF's exact joint distribution.
pub fn sample(mrf: &Mrf, seed: u64) -> Result<Vec<usize>> {
    Ok(mrf.joint_table()?.sample(seed))
}
