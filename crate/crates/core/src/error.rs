// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share an eigenbasis (or model) do not.
    #[error("basis mismatch: expected alpha = {expected:e} J m, found {found:e} J m")]
    BasisMismatch { expected: f64, found: f64 },

    /// The density matrix lost positivity, hermiticity or trace.
    #[error("state integrity violated: {0}")]
    Integrity(String),

    /// Barrier insertion did not reach the gap threshold within the step cap.
    #[error("barrier insertion exceeded the cap of {cap} quench steps")]
    StepCap { cap: u64 },

    /// A numerical routine failed in a way valid inputs cannot trigger.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
