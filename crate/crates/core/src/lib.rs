// SPDX-License-Identifier: Apache-2.0

//! Revenue and stopping-rule bounds for buyers whose item types follow a
//! Markov random field.

pub mod coretail;
pub mod error;
pub mod format;
pub mod lp;
pub mod mechanisms;
pub mod mrf;
pub mod ocrs;
pub mod prophet;
pub mod report;
pub mod space;
pub mod valuation;

pub use error::{Error, Result};
