// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants, CODATA 2018 exact/recommended values (SI).

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

/// Electron rest mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Label recorded in run manifests.
pub const CODATA_RELEASE: &str = "CODATA 2018";
