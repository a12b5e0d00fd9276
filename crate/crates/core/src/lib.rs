// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Finite-time quantum Stirling engine.
//!
//! The working substance is a particle in a one-dimensional box with a
//! central delta barrier whose strength is raised and lowered in sudden
//! steps, each followed by Lindblad thermalization against a bath. The crate
//! computes the spectrum and basis changes, evolves the density matrix,
//! assembles the four-stroke cycle ledger and runs parameter sweeps.

pub mod constants;
pub mod engine;
pub mod error;
pub mod lindblad;
pub mod spectrum;
pub mod state;
pub mod sweep;

pub use engine::{run_cycle, CycleConfig, CycleLedger, QuenchSchedule};
pub use error::{Error, Result};
pub use lindblad::{CoherenceMode, DissipatorConfig};
pub use spectrum::{solve_spectrum, ModelParams, Spectrum};
pub use state::{BathParams, DensityMatrix};
pub use sweep::{contour_grid, max_power_search, sweep_r, sweep_sigma, MaxPower, SweepOptions, SweepRecord, SweepTable};
