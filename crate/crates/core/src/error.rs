// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the exact-computation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("product support has {size} outcomes, exceeding the cap of {cap}")]
    SupportTooLarge { size: u128, cap: usize },

    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid target distribution at vertex {vertex}: {reason}")]
    InvalidTarget { vertex: usize, reason: String },

    #[error("valuation error: {0}")]
    Valuation(String),

    #[error("ratio undefined: every denominator is zero")]
    UndefinedRatio,

    #[error("LP has {vars} variables, exceeding the cap of {cap}")]
    LpTooLarge { vars: usize, cap: usize },

    #[error("LP solver failure: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error("expected maximum is zero; thresholds cannot be normalized")]
    ZeroOpt,

    #[error("no valid instance size for delta = {delta}: {reason}")]
    DegenerateInstance { delta: f64, reason: String },

    #[error("scheme infeasible at element {element}: selection probability {q} exceeds 1")]
    InfeasibleScheme { element: usize, q: f64 },

    #[error("instance format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
