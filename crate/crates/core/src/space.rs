// SPDX-License-Identifier: Apache-2.0

//! Mixed-radix indexing over finite product spaces.
//!
//! Outcomes are enumerated lexicographically with coordinate 0 as the most
//! significant digit, so every prefix of coordinates owns a contiguous block
//! of flat indices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    radices: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl ProductSpace {
    /// Builds the space, failing when it has more than `cap` points.
    pub fn new(radices: &[usize], cap: usize) -> Result<Self> {
        let mut size: u128 = 1;
        for &r in radices {
            if r == 0 {
                return Err(Error::InvalidModel("empty support".into()));
            }
            size = size.saturating_mul(r as u128);
        }
        if size > cap as u128 {
            return Err(Error::SupportTooLarge { size, cap });
        }
        let mut strides = vec![1usize; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        Ok(Self { radices: radices.to_vec(), strides, len: size as usize })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn dims(&self) -> usize {
        self.radices.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = index / s;
            index %= s;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims()];
        self.decode_into(index, &mut out);
        out
    }

    /// Visits every point in index order without allocating per point.
    pub fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut digits = vec![0usize; self.dims()];
        for index in 0..self.len {
            f(index, &digits);
            advance(&mut digits, &self.radices);
        }
    }
}

/// Increments `digits` as an odometer; returns false after wrapping to zero.
pub fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}
