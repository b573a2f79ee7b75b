// SPDX-License-Identifier: Apache-2.0

//! Instance generation and verification suites for `mrfbound`.

pub mod config;
pub mod generate;
pub mod suite;
