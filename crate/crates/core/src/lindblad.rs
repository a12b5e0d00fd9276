// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Thermalization at fixed barrier strength.
//!
//! Master equation with adjacent-level jump operators
//! `L_k = |psi_{k-1}><psi_k|`, Ohmic rates `gamma_k = dw_k / divisor` and
//! Bose-Einstein occupations `N_k = 1 / (exp(beta hbar dw_k) - 1)`:
//!
//! ```text
//! drho/dt = -i/hbar [H, rho]
//!           + sum_k gamma_k (N_k + 1) (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
//!           + sum_k gamma_k N_k       (L_k^+ rho L_k - 1/2 {L_k L_k^+, rho})
//! ```
//!
//! In the instantaneous eigenbasis every `L_k` is a matrix unit, so the
//! populations follow a birth-death ladder and each coherence `p_mn` only
//! rotates and decays at `(G_m + G_n) / 2`, where `G_m` is the total
//! out-rate of level `m`. One elementary step applies the rotation exactly
//! and then a forward-Euler step of the dissipator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{ModelParams, Spectrum};
use crate::state::{BathParams, DensityMatrix, POSITIVITY_TOLERANCE};

/// How coherences are treated between quenches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoherenceMode {
    /// Exact phase rotation plus dissipative damping.
    #[default]
    ExactPhase,
    /// Coherences are discarded (classical rate equation).
    DropCoherences,
}

impl CoherenceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoherenceMode::ExactPhase => "exact-phase",
            CoherenceMode::DropCoherences => "drop-coherences",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorConfig {
    /// `gamma_k = dw_k / gamma_divisor`.
    pub gamma_divisor: f64,
    /// Elementary thermalization time, s.
    pub delta_tau: f64,
    /// Below this `beta hbar dw` the rates take their degenerate limit.
    pub degenerate_gap_threshold: f64,
    pub coherence: CoherenceMode,
}

/// `2 pi hbar / (divisor (E_4 - E_3))` with the bare-box gap `E_4 - E_3 = 7 E_1`.
pub fn elementary_time(params: &ModelParams, divisor: f64) -> f64 {
    2.0 * PI * params.hbar / (divisor * 7.0 * params.bare_ground_energy())
}

impl DissipatorConfig {
    pub fn for_model(params: &ModelParams, gamma_divisor: f64, dtau_divisor: f64) -> Self {
        Self {
            gamma_divisor,
            delta_tau: elementary_time(params, dtau_divisor),
            degenerate_gap_threshold: 1e-6,
            coherence: CoherenceMode::ExactPhase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_divisor.is_finite() && self.gamma_divisor > 0.0) {
            return Err(Error::Domain(format!(
                "gamma divisor must be positive, got {}",
                self.gamma_divisor
            )));
        }
        if !(self.delta_tau.is_finite() && self.delta_tau > 0.0) {
            return Err(Error::Domain(format!(
                "elementary time must be positive, got {:e} s",
                self.delta_tau
            )));
        }
        if !(self.degenerate_gap_threshold >= 0.0) {
            return Err(Error::Domain("degenerate gap threshold must be non-negative".into()));
        }
        Ok(())
    }
}

/// The `k -> k-1` channel and its reverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Upper level `k` (1-based); the lower level is `k - 1`.
    pub upper: usize,
    /// `dw_k = (E_k - E_{k-1}) / hbar`, rad/s.
    pub frequency: f64,
    /// `N_k`; infinite for an exactly degenerate pair.
    pub occupation: f64,
    /// `gamma_k (N_k + 1)`, 1/s.
    pub down_rate: f64,
    /// `gamma_k N_k`, 1/s.
    pub up_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    pub transitions: Vec<Transition>,
    /// Total out-rate of each level (0-based), 1/s.
    pub outflow: Vec<f64>,
    basis_alpha: f64,
}

impl TransitionSet {
    /// Rate matrix `G` of the population ladder, `dp/dt = G p`.
    pub fn rate_matrix(&self) -> DMatrix<f64> {
        let n = self.outflow.len();
        let mut g = DMatrix::zeros(n, n);
        for t in &self.transitions {
            let (lo, hi) = (t.upper - 2, t.upper - 1);
            g[(lo, hi)] += t.down_rate;
            g[(hi, hi)] -= t.down_rate;
            g[(hi, lo)] += t.up_rate;
            g[(lo, lo)] -= t.up_rate;
        }
        g
    }
}

/// Adjacent-level rates for `spectrum` in contact with `bath`.
pub fn build_transitions(spectrum: &Spectrum, bath: &BathParams, config: &DissipatorConfig) -> TransitionSet {
    let hbar = spectrum.params().hbar;
    let n = spectrum.len();
    let degenerate_rate = 1.0 / (config.gamma_divisor * bath.beta * hbar);
    let transitions: Vec<Transition> = (2..=n)
        .map(|k| {
            let frequency = ((spectrum.energy(k) - spectrum.energy(k - 1)) / hbar).max(0.0);
            let x = bath.beta * hbar * frequency;
            if x < config.degenerate_gap_threshold {
                Transition {
                    upper: k,
                    frequency,
                    occupation: if x > 0.0 { 1.0 / x.exp_m1() } else { f64::INFINITY },
                    down_rate: degenerate_rate,
                    up_rate: degenerate_rate,
                }
            } else {
                let occupation = 1.0 / x.exp_m1();
                let gamma = frequency / config.gamma_divisor;
                Transition {
                    upper: k,
                    frequency,
                    occupation,
                    down_rate: gamma * (occupation + 1.0),
                    up_rate: gamma * occupation,
                }
            }
        })
        .collect();
    let mut outflow = vec![0.0; n];
    for t in &transitions {
        outflow[t.upper - 1] += t.down_rate;
        outflow[t.upper - 2] += t.up_rate;
    }
    TransitionSet {
        transitions,
        outflow,
        basis_alpha: spectrum.alpha(),
    }
}

/// Dissipative part of the master equation.
pub(crate) fn dissipator(rho: &DMatrix<Complex64>, set: &TransitionSet) -> DMatrix<Complex64> {
    let n = rho.nrows();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for t in &set.transitions {
        let (lo, hi) = (t.upper - 2, t.upper - 1);
        let flux = t.down_rate * rho[(hi, hi)].re - t.up_rate * rho[(lo, lo)].re;
        out[(lo, lo)] += flux;
        out[(hi, hi)] -= flux;
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[(i, j)] = -rho[(i, j)] * (0.5 * (set.outflow[i] + set.outflow[j]));
            }
        }
    }
    out
}

fn ensure_basis(rho: &DensityMatrix, spectrum: &Spectrum, set: &TransitionSet) -> Result<()> {
    for alpha in [spectrum.alpha(), set.basis_alpha] {
        if rho.basis_alpha != alpha {
            return Err(Error::BasisMismatch {
                expected: alpha,
                found: rho.basis_alpha,
            });
        }
    }
    Ok(())
}

/// One elementary step of length `config.delta_tau`.
pub fn elementary_step(
    rho: &DensityMatrix,
    spectrum: &Spectrum,
    transitions: &TransitionSet,
    config: &DissipatorConfig,
) -> Result<DensityMatrix> {
    ensure_basis(rho, spectrum, transitions)?;
    let n = rho.dim();
    let dt = config.delta_tau;
    let hbar = spectrum.params().hbar;
    let mut rotated = rho.elements.clone();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            rotated[(i, j)] = match config.coherence {
                CoherenceMode::ExactPhase => {
                    let phase = -(spectrum.energy(i + 1) - spectrum.energy(j + 1)) * dt / hbar;
                    rotated[(i, j)] * Complex64::from_polar(1.0, phase)
                }
                CoherenceMode::DropCoherences => Complex64::new(0.0, 0.0),
            };
        }
    }
    let d = dissipator(&rotated, transitions);
    let next = DensityMatrix {
        elements: rotated + d * Complex64::new(dt, 0.0),
        basis_alpha: rho.basis_alpha,
    };
    next.ensure_positive(POSITIVITY_TOLERANCE)?;
    Ok(next)
}

/// `r` elementary steps at fixed spectrum, composed algebraically: the
/// population map `(I + dt G)^r` and the per-coherence factor raised to `r`.
#[derive(Debug, Clone)]
pub struct Propagator {
    /// Population map minus the identity.
    populations: DMatrix<f64>,
    coherences: DMatrix<Complex64>,
    mode: CoherenceMode,
}

impl Propagator {
    pub fn new(spectrum: &Spectrum, transitions: &TransitionSet, config: &DissipatorConfig, steps: u32) -> Self {
        let n = spectrum.len();
        let dt = config.delta_tau;
        let hbar = spectrum.params().hbar;
        let populations = deviation_power(&(transitions.rate_matrix() * dt), steps);
        let mut coherences = DMatrix::<Complex64>::zeros(n, n);
        if config.coherence == CoherenceMode::ExactPhase {
            for i in 0..n {
                for j in (i + 1)..n {
                    let phase = -(spectrum.energy(i + 1) - spectrum.energy(j + 1)) * dt / hbar;
                    let damping = 1.0 - 0.5 * (transitions.outflow[i] + transitions.outflow[j]) * dt;
                    let factor = (Complex64::from_polar(1.0, phase) * damping).powu(steps);
                    coherences[(i, j)] = factor;
                    coherences[(j, i)] = factor.conj();
                }
            }
        }
        Self {
            populations,
            coherences,
            mode: config.coherence,
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let n = rho.dim();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let mut p = rho.elements[(i, i)].re;
            for j in 0..n {
                p += self.populations[(i, j)] * rho.elements[(j, j)].re;
            }
            out[(i, i)] = Complex64::new(p, 0.0);
        }
        if self.mode == CoherenceMode::ExactPhase {
            for i in 0..n {
                for j in (i + 1)..n {
                    let z = rho.elements[(i, j)] * self.coherences[(i, j)];
                    out[(i, j)] = z;
                    out[(j, i)] = z.conj();
                }
            }
        }
        DensityMatrix {
            elements: out,
            basis_alpha: rho.basis_alpha,
        }
    }
}

/// `(I + D)^exp - I` for a generator-like `D` whose columns sum to zero.
///
/// Powering the deviation rather than `I + D` keeps the column sums at zero to
/// roundoff relative to `|D|` instead of 1, so trace drift does not grow with
/// `exp`.
fn deviation_power(d: &DMatrix<f64>, mut exp: u32) -> DMatrix<f64> {
    // flat column-major buffers: this runs once per quench, so the 4x4
    // products must not allocate
    let n = d.nrows();
    let mut base = d.as_slice().to_vec();
    let mut result = vec![0.0; n * n];
    let mut product = vec![0.0; n * n];
    let mut first = true;
    while exp > 0 {
        if exp & 1 == 1 {
            if first {
                result.copy_from_slice(&base);
                first = false;
            } else {
                multiply(n, &result, &base, &mut product);
                for ((r, b), p) in result.iter_mut().zip(&base).zip(&product) {
                    *r += b + p;
                }
            }
            zero_column_sums(n, &mut result);
        }
        exp >>= 1;
        if exp > 0 {
            multiply(n, &base, &base, &mut product);
            for (b, p) in base.iter_mut().zip(&product) {
                *b = 2.0 * *b + p;
            }
            zero_column_sums(n, &mut base);
        }
    }
    DMatrix::from_vec(n, n, result)
}

/// `out = a b` for column-major `n x n` buffers.
fn multiply(n: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    match n {
        2 => multiply_fixed::<2>(a, b, out),
        4 => multiply_fixed::<4>(a, b, out),
        6 => multiply_fixed::<6>(a, b, out),
        _ => multiply_dyn(n, a, b, out),
    }
}

/// [`multiply`] with the size known at compile time, so the loops unroll.
fn multiply_fixed<const N: usize>(a: &[f64], b: &[f64], out: &mut [f64]) {
    let (a, b, out) = (&a[..N * N], &b[..N * N], &mut out[..N * N]);
    for j in 0..N {
        for i in 0..N {
            let mut acc = 0.0;
            for k in 0..N {
                acc += a[i + N * k] * b[k + N * j];
            }
            out[i + N * j] = acc;
        }
    }
}

fn multiply_dyn(n: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    for j in 0..n {
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i + n * k] * b[k + n * j];
            }
            out[i + n * j] = acc;
        }
    }
}

fn zero_column_sums(n: usize, m: &mut [f64]) {
    for j in 0..n {
        let col = &mut m[n * j..n * (j + 1)];
        let off: f64 = col.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| v).sum();
        col[j] = -off;
    }
}

/// Result of a thermalization interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Thermalized {
    pub state: DensityMatrix,
    /// `Tr[H (rho' - rho)]`, J; positive when the system absorbs heat.
    pub heat: f64,
}

/// `r` elementary steps in contact with `bath` at fixed `spectrum`.
pub fn thermalize(
    rho: &DensityMatrix,
    spectrum: &Spectrum,
    bath: &BathParams,
    steps: u32,
    config: &DissipatorConfig,
) -> Result<Thermalized> {
    if steps == 0 {
        return Err(Error::Domain("thermalization needs at least one elementary step".into()));
    }
    let transitions = build_transitions(spectrum, bath, config);
    ensure_basis(rho, spectrum, &transitions)?;
    let propagator = Propagator::new(spectrum, &transitions, config, steps);
    let mut start = rho.clone();
    if config.coherence == CoherenceMode::DropCoherences {
        start.drop_coherences();
    }
    let state = propagator.apply(&start);
    state.ensure_positive(POSITIVITY_TOLERANCE)?;
    let heat = spectrum
        .energies()
        .enumerate()
        .map(|(i, e)| e * (state.elements[(i, i)].re - rho.elements[(i, i)].re))
        .sum();
    Ok(Thermalized { state, heat })
}
