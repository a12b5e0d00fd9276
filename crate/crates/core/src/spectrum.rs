// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Instantaneous eigenproblem of an infinite box `(-a, a)` with a central
//! delta barrier `alpha * delta(x)`, and overlaps between eigenbases at two
//! barrier strengths.
//!
//! Even-indexed levels have a node at the barrier and never move:
//! `k_n = n pi / (2a)`. Odd-indexed level `n = 2p - 1` solves
//! `g sin(y) + y cos(y) = 0` on `((2p - 1) pi / 2, p pi)` with `y = k a` and
//! the dimensionless strength `g = m alpha a / hbar^2`.
//!
//! Eigenfunctions are
//!
//! ```text
//! psi_n(x) = A_n sin(k_n (x + a))    -a < x < 0
//!          = B_n sin(k_n (x - a))     0 < x < a
//! ```
//!
//! with `A_n = (a - sin(2 k_n a) / (2 k_n))^(-1/2)`, `B_n = -A_n` for odd `n`
//! and `B_n = A_n` for even `n`. The sign choice keeps `A_n > 0`, which makes
//! the basis continuous in `alpha`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::{ELECTRON_MASS, HBAR, K_B};
use crate::error::{Error, Result};

/// Relative bisection tolerance on `y = k a`.
const ROOT_REL_TOL: f64 = 1e-14;

/// Below this `|y - y'|` the kernel `sin(d) / d` is replaced by its series.
const SERIES_SWITCH: f64 = 1e-6;

/// Box geometry, particle mass, constants and the number of retained levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Half-width `a` of the box, m.
    pub half_width: f64,
    /// Particle mass, kg.
    pub mass: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Number of retained levels (even, at least 2).
    pub n_max: usize,
}

impl ModelParams {
    /// Build a model with CODATA 2018 constants.
    pub fn new(half_width: f64, mass: f64, n_max: usize) -> Result<Self> {
        let params = Self {
            half_width,
            mass,
            hbar: HBAR,
            k_b: K_B,
            n_max,
        };
        params.validate()?;
        Ok(params)
    }

    /// An electron in a 40 nm box (a = 20 nm), four retained levels.
    pub fn electron_box() -> Self {
        Self {
            half_width: 20.0 / 1e9,
            mass: ELECTRON_MASS,
            hbar: HBAR,
            k_b: K_B,
            n_max: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::Domain(format!(
                "half-width must be positive, got {:e} m",
                self.half_width
            )));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::Domain(format!(
                "mass must be positive, got {:e} kg",
                self.mass
            )));
        }
        if !(self.hbar > 0.0 && self.k_b > 0.0) {
            return Err(Error::Domain("hbar and k_B must be positive".into()));
        }
        if self.n_max < 2 || self.n_max % 2 != 0 {
            return Err(Error::Domain(format!(
                "n_max must be even and at least 2, got {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Dimensionless barrier strength `g = m alpha a / hbar^2`.
    pub fn coupling(&self, alpha: f64) -> f64 {
        self.mass * alpha * self.half_width / (self.hbar * self.hbar)
    }

    /// Inverse of [`ModelParams::coupling`].
    pub fn alpha_from_coupling(&self, g: f64) -> f64 {
        g * self.hbar * self.hbar / (self.mass * self.half_width)
    }

    /// Ground energy of the bare box, `pi^2 hbar^2 / (8 m a^2)`.
    pub fn bare_ground_energy(&self) -> f64 {
        self.energy_of_root(FRAC_PI_2)
    }

    /// Energy `hbar^2 k^2 / (2m)` of a level with `k a = y`.
    pub fn energy_of_root(&self, y: f64) -> f64 {
        let k = y / self.half_width;
        self.hbar * self.hbar * k * k / (2.0 * self.mass)
    }
}

/// Behaviour of an eigenfunction under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// Symmetric; the odd-indexed levels (antinode at the barrier).
    Even,
    /// Antisymmetric; the even-indexed levels (node at the barrier).
    Odd,
}

impl Parity {
    pub fn of_index(n: usize) -> Self {
        if n % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    /// Level index, starting at 1.
    pub index: usize,
    /// Wavenumber `k_n`, 1/m.
    pub wavenumber: f64,
    /// Energy `E_n`, J.
    pub energy: f64,
    pub parity: Parity,
}

/// The retained levels of the box at one barrier strength.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    params: ModelParams,
    alpha: f64,
    levels: Vec<Level>,
}

impl Spectrum {
    /// Assemble a spectrum from already-solved odd-level roots `y_{2p-1}`,
    /// `p = 1..=n_max/2`.
    pub(crate) fn from_odd_roots(params: ModelParams, alpha: f64, odd_roots: &[f64]) -> Self {
        debug_assert_eq!(odd_roots.len(), params.n_max / 2);
        let levels = (1..=params.n_max)
            .map(|n| {
                let y = if n % 2 == 0 {
                    n as f64 * FRAC_PI_2
                } else {
                    odd_roots[(n - 1) / 2]
                };
                Level {
                    index: n,
                    wavenumber: y / params.half_width,
                    energy: params.energy_of_root(y),
                    parity: Parity::of_index(n),
                }
            })
            .collect();
        Self {
            params,
            alpha,
            levels,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Barrier strength, J m.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimensionless barrier strength.
    pub fn coupling(&self) -> f64 {
        self.params.coupling(self.alpha)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Level `n` (1-based).
    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n - 1]
    }

    /// Energy of level `n` (1-based), J.
    pub fn energy(&self, n: usize) -> f64 {
        self.levels[n - 1].energy
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.energy)
    }

    /// `k_n a` for level `n` (1-based).
    pub fn root(&self, n: usize) -> f64 {
        self.levels[n - 1].wavenumber * self.params.half_width
    }

    /// `E_2 - E_1`, J.
    pub fn ground_gap(&self) -> f64 {
        self.energy(2) - self.energy(1)
    }

    /// `1 - sin(2y) / (2y)`, i.e. `1 / (a A_n^2)`; exactly 1 where `sin(2y)`
    /// vanishes analytically.
    fn norm_factor(&self, n: usize) -> f64 {
        if n % 2 == 0 || self.alpha == 0.0 {
            1.0
        } else {
            let y = self.root(n);
            1.0 - (2.0 * y).sin() / (2.0 * y)
        }
    }
}

/// Solve the `n_max` lowest levels at barrier strength `alpha` (J m).
pub fn solve_spectrum(params: &ModelParams, alpha: f64) -> Result<Spectrum> {
    params.validate()?;
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "barrier strength must be finite and non-negative, got {alpha:e} J m"
        )));
    }
    let g = params.coupling(alpha);
    let roots = (1..=params.n_max / 2)
        .map(|p| odd_root(g, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::from_odd_roots(*params, alpha, &roots))
}

/// Root `y` of `g sin(y) + y cos(y) = 0` on `((2p - 1) pi / 2, p pi)`.
pub fn odd_root(g: f64, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("odd-level branch index starts at 1".into()));
    }
    if !g.is_finite() || g < 0.0 {
        return Err(Error::Domain(format!(
            "dimensionless strength must be finite and non-negative, got {g}"
        )));
    }
    let left = (2 * p - 1) as f64 * FRAC_PI_2;
    let right = p as f64 * PI;
    if g == 0.0 {
        return Ok(left);
    }

    let f = |y: f64| g * y.sin() + y * y.cos();
    // Endpoint signs are analytic: f(left) = g (-1)^(p+1), f(right) = p pi (-1)^p.
    let left_positive = p % 2 == 1;
    let right_positive = !left_positive;
    if left_positive == right_positive {
        return Err(Error::Internal(format!("no sign change on branch {p}")));
    }

    let (mut lo, mut hi) = (left, right);
    for _ in 0..256 {
        if hi - lo <= ROOT_REL_TOL * lo {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == left_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Internal(format!(
        "bisection did not converge for g = {g}, branch {p}"
    )))
}

/// Left/right amplitudes of an eigenfunction, 1/sqrt(m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    /// `A_n`, multiplies `sin(k (x + a))` on `-a < x < 0`.
    pub left: f64,
    /// `B_n`, multiplies `sin(k (x - a))` on `0 < x < a`.
    pub right: f64,
}

/// Unit-normalizing amplitudes of level `n` (1-based).
pub fn normalization(params: &ModelParams, spectrum: &Spectrum, n: usize) -> Result<Amplitudes> {
    if *params != spectrum.params {
        return Err(Error::Domain("spectrum belongs to different model parameters".into()));
    }
    if n == 0 || n > spectrum.len() {
        return Err(Error::Domain(format!(
            "level index {n} outside 1..={}",
            spectrum.len()
        )));
    }
    let left = 1.0 / (params.half_width * spectrum.norm_factor(n)).sqrt();
    let right = if n % 2 == 1 { -left } else { left };
    Ok(Amplitudes { left, right })
}

/// `psi_n(x)` in 1/sqrt(m); zero outside the box.
pub fn wavefunction(spectrum: &Spectrum, n: usize, x: f64) -> f64 {
    let a = spectrum.params.half_width;
    if x <= -a || x >= a {
        return 0.0;
    }
    let amp = normalization(&spectrum.params, spectrum, n).expect("level index in range");
    let k = spectrum.level(n).wavenumber;
    if x < 0.0 {
        amp.left * (k * (x + a)).sin()
    } else {
        amp.right * (k * (x - a)).sin()
    }
}

/// Overlaps between the retained eigenbases at two barrier strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    pub alpha_old: f64,
    pub alpha_new: f64,
    /// `S[(m, n)] = <psi_m(alpha_new) | psi_n(alpha_old)>`, 0-based indices.
    pub matrix: DMatrix<f64>,
    /// Per old level, `1 - sum_m S[(m, n)]^2`: weight outside the retained
    /// new levels.
    pub leakage: Vec<f64>,
}

impl BasisChange {
    pub fn identity(alpha: f64, n_max: usize) -> Self {
        Self {
            alpha_old: alpha,
            alpha_new: alpha,
            matrix: DMatrix::identity(n_max, n_max),
            leakage: vec![0.0; n_max],
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `sin(d) / d` with its series below the switch point.
fn sinc(d: f64) -> f64 {
    if d.abs() < SERIES_SWITCH {
        let d2 = d * d;
        1.0 - d2 / 6.0 + d2 * d2 / 120.0
    } else {
        d.sin() / d
    }
}

/// Overlap of two symmetric (odd-indexed) levels with roots `y_new`, `y_old`
/// and norm factors `n_new`, `n_old`. Both half-boxes contribute
/// `A A' int_0^a sin(k u) sin(k' u) du` equally.
fn symmetric_overlap(y_new: f64, n_new: f64, y_old: f64, n_old: f64) -> f64 {
    let sum = y_new + y_old;
    let kernel = 0.5 * sinc(y_new - y_old) - sum.sin() / (2.0 * sum);
    2.0 * kernel / (n_new * n_old).sqrt()
}

/// Basis change from the eigenbasis of `old` to that of `new`.
pub fn overlap_matrix(params: &ModelParams, old: &Spectrum, new: &Spectrum) -> Result<BasisChange> {
    if old.params != *params || new.params != *params {
        return Err(Error::Domain(
            "spectra belong to different model parameters".into(),
        ));
    }
    let dim = params.n_max;
    if old.alpha == new.alpha {
        return Ok(BasisChange::identity(old.alpha, dim));
    }

    let mut matrix = DMatrix::zeros(dim, dim);
    for n in (2..=dim).step_by(2) {
        matrix[(n - 1, n - 1)] = 1.0;
    }
    let norms_new: Vec<f64> = (1..=dim).map(|n| new.norm_factor(n)).collect();
    let norms_old: Vec<f64> = (1..=dim).map(|n| old.norm_factor(n)).collect();
    for m in (1..=dim).step_by(2) {
        for n in (1..=dim).step_by(2) {
            matrix[(m - 1, n - 1)] = symmetric_overlap(
                new.root(m),
                norms_new[m - 1],
                old.root(n),
                norms_old[n - 1],
            );
        }
    }
    let leakage = (0..dim)
        .map(|n| 1.0 - matrix.column(n).iter().map(|s| s * s).sum::<f64>())
        .collect();
    Ok(BasisChange {
        alpha_old: old.alpha,
        alpha_new: new.alpha,
        matrix,
        leakage,
    })
}
