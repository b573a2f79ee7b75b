// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use mrfbound_core::mechanisms::DEFAULT_LP_VAR_CAP;
use mrfbound_core::valuation::ValuationKind;

pub const LP_VAR_CAP_ENV: &str = "MRFBOUND_LP_VAR_CAP";

/// Inclusive integer range, written `lo..=hi` or `lo-hi` or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
}

impl IntRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        ensure!(lo <= hi, "empty range {lo}..={hi}");
        Ok(Self { lo, hi })
    }
}

impl FromStr for IntRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once("..=").or_else(|| s.split_once('-')).unwrap_or((s, s));
        Self::new(a.trim().parse()?, b.trim().parse()?)
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..={}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Conditioning,
    Theorems,
    Lemmas,
    LpRev,
    Prophet,
    Ocrs,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Conditioning, Check::Theorems, Check::Lemmas, Check::LpRev, Check::Prophet, Check::Ocrs];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Conditioning => "conditioning",
            Check::Theorems => "theorems",
            Check::Lemmas => "lemmas",
            Check::LpRev => "lp-rev",
            Check::Prophet => "prophet",
            Check::Ocrs => "ocrs",
        }
    }
}

impl FromStr for Check {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match Check::ALL.iter().find(|c| c.as_str() == s) {
            Some(&c) => Ok(c),
            None => bail!("unknown check {s:?}"),
        }
    }
}

pub fn parse_class(s: &str) -> Result<ValuationKind> {
    ValuationKind::parse(&s.replace('-', "_")).ok_or_else(|| anyhow::anyhow!("unknown buyer class {s:?}"))
}

/// What to generate and which checks to run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub count: usize,
    pub n: IntRange,
    pub support: IntRange,
    /// Potentials are drawn uniformly from `[-cap, cap]`.
    pub potential_cap: f64,
    pub class: ValuationKind,
    pub checks: Vec<Check>,
    pub lp_var_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 100,
            n: IntRange { lo: 1, hi: 3 },
            support: IntRange { lo: 2, hi: 3 },
            potential_cap: 1.0,
            class: ValuationKind::Additive,
            checks: vec![Check::Theorems, Check::Lemmas],
            lp_var_cap: DEFAULT_LP_VAR_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n.lo >= 1, "need at least one item");
        ensure!(self.n.hi <= 16, "at most 16 items");
        ensure!(self.support.lo >= 1, "supports must be nonempty");
        ensure!(self.potential_cap.is_finite() && self.potential_cap >= 0.0, "potential cap must be finite and >= 0");
        let worst = (self.support.hi as f64).powi(self.n.hi as i32);
        ensure!(worst <= 1e6, "largest joint support {worst} exceeds 1e6 outcomes");
        ensure!(self.lp_var_cap > 0, "LP variable cap must be positive");
        Ok(())
    }

    /// Seed of the `index`-th instance.
    pub fn instance_seed(&self, index: usize) -> u64 {
        // splitmix64 step, so neighbouring base seeds give unrelated streams
        let mut z = self.seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) >> 1
    }
}

/// LP variable cap from the environment, or the library default.
pub fn lp_var_cap_from_env() -> Result<usize> {
    match std::env::var(LP_VAR_CAP_ENV) {
        Ok(v) => Ok(v.trim().parse().map_err(|e| anyhow::anyhow!("{LP_VAR_CAP_ENV}={v:?}: {e}"))?),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_LP_VAR_CAP),
        Err(e) => bail!("{LP_VAR_CAP_ENV}: {e}"),
    }
}
