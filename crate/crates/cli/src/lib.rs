// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration parsing, result serialization and command dispatch for the
//! `qstirling` binary.

pub mod config;
pub mod report;
pub mod run;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "QSTIRLING_WORKERS";
