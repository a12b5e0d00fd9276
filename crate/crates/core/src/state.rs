// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices in the instantaneous eigenbasis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::{BasisChange, Spectrum};

/// Smallest eigenvalue tolerated before a run is aborted.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Tolerance on `|rho - rho^dagger|`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Temperature of a thermal bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    /// K
    pub temperature: f64,
    /// `1 / (k_B T)`, 1/J
    pub beta: f64,
}

impl BathParams {
    pub fn new(temperature: f64, k_b: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::Domain(format!(
                "bath temperature must be positive, got {temperature} K"
            )));
        }
        Ok(Self {
            temperature,
            beta: 1.0 / (k_b * temperature),
        })
    }

    /// `k_B T`, J.
    pub fn thermal_energy(&self) -> f64 {
        1.0 / self.beta
    }
}

/// `rho = sum_nm p_nm |psi_n><psi_m|` in the eigenbasis at `basis_alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub elements: DMatrix<Complex64>,
    /// Barrier strength (J m) whose eigenbasis the matrix is written in.
    pub basis_alpha: f64,
}

impl DensityMatrix {
    pub fn from_populations(populations: &[f64], basis_alpha: f64) -> Self {
        let n = populations.len();
        let mut elements = DMatrix::zeros(n, n);
        for (i, &p) in populations.iter().enumerate() {
            elements[(i, i)] = Complex64::new(p, 0.0);
        }
        Self {
            elements,
            basis_alpha,
        }
    }

    /// `|psi_n><psi_n|` for level `n` (1-based).
    pub fn pure_level(dim: usize, n: usize, basis_alpha: f64) -> Self {
        let mut pops = vec![0.0; dim];
        pops[n - 1] = 1.0;
        Self::from_populations(&pops, basis_alpha)
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).sum()
    }

    pub fn population(&self, n: usize) -> f64 {
        self.elements[(n - 1, n - 1)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).collect()
    }

    /// Element `p_nm`, 1-based.
    pub fn element(&self, n: usize, m: usize) -> Complex64 {
        self.elements[(n - 1, m - 1)]
    }

    /// `max |p_nm - conj(p_mn)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.elements[(i, j)] - self.elements[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    /// Fails if some eigenvalue is below `-tolerance`.
    pub fn ensure_positive(&self, tolerance: f64) -> Result<()> {
        if shifted_cholesky_succeeds(&self.elements, tolerance) {
            return Ok(());
        }
        Err(Error::Integrity(format!(
            "density matrix at alpha = {:e} J m has eigenvalue {:e} below -{:e}",
            self.basis_alpha,
            self.min_eigenvalue(),
            tolerance
        )))
    }

    /// Hermiticity, trace within `[1 - leakage_budget, 1 + 1e-12]` and
    /// positivity.
    pub fn check_integrity(&self, leakage_budget: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::Integrity(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if tr > 1.0 + 1e-12 || tr < 1.0 - leakage_budget {
            return Err(Error::Integrity(format!(
                "trace {tr} outside [1 - {leakage_budget:e}, 1 + 1e-12]"
            )));
        }
        self.ensure_positive(POSITIVITY_TOLERANCE)
    }

    /// Overwrite all off-diagonal elements with zero.
    pub fn drop_coherences(&mut self) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    self.elements[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    fn ensure_basis(&self, alpha: f64) -> Result<()> {
        if self.basis_alpha != alpha {
            return Err(Error::BasisMismatch {
                expected: alpha,
                found: self.basis_alpha,
            });
        }
        Ok(())
    }
}

/// Cholesky factorization of `m + shift I`; succeeds iff every eigenvalue of
/// the Hermitian part exceeds `-shift`.
fn shifted_cholesky_succeeds(m: &DMatrix<Complex64>, shift: f64) -> bool {
    let n = m.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re + shift;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return false;
        }
        let root = pivot.sqrt();
        l[(j, j)] = Complex64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / root;
        }
    }
    true
}

/// Canonical state `exp(-beta H) / Z` over the retained levels.
pub fn gibbs_state(spectrum: &Spectrum, bath: &BathParams) -> DensityMatrix {
    DensityMatrix::from_populations(&gibbs_populations(spectrum, bath), spectrum.alpha())
}

pub(crate) fn gibbs_populations(spectrum: &Spectrum, bath: &BathParams) -> Vec<f64> {
    let ground = spectrum.energy(1);
    let weights: Vec<f64> = spectrum
        .energies()
        .map(|e| (-bath.beta * (e - ground)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// A state re-expressed in a new eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub state: DensityMatrix,
    /// Trace lost to levels outside the retained set.
    pub leaked: f64,
}

/// Sudden change of basis: `rho' = S rho S^T`, no renormalization.
pub fn transform(rho: &DensityMatrix, change: &BasisChange) -> Result<Transformed> {
    rho.ensure_basis(change.alpha_old)?;
    let n = rho.dim();
    if change.dim() != n {
        return Err(Error::Domain(format!(
            "basis change of dimension {} applied to a {n}-level state",
            change.dim()
        )));
    }
    let s = &change.matrix;
    // t = S rho
    let mut t = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                let sil = s[(i, l)];
                if sil != 0.0 {
                    acc += rho.elements[(l, k)] * sil;
                }
            }
            t[(i, k)] = acc;
        }
    }
    // upper triangle of t S^T, mirrored so the result is exactly Hermitian
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let sjk = s[(j, k)];
                if sjk != 0.0 {
                    acc += t[(i, k)] * sjk;
                }
            }
            if i == j {
                out[(i, i)] = Complex64::new(acc.re, 0.0);
            } else {
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
    }
    let state = DensityMatrix {
        elements: out,
        basis_alpha: change.alpha_new,
    };
    let leaked = rho.trace() - state.trace();
    Ok(Transformed { state, leaked })
}

/// `Tr[H rho]`, J.
pub fn internal_energy(rho: &DensityMatrix, spectrum: &Spectrum) -> Result<f64> {
    rho.ensure_basis(spectrum.alpha())?;
    Ok(energy_unchecked(rho, spectrum))
}

pub(crate) fn energy_unchecked(rho: &DensityMatrix, spectrum: &Spectrum) -> f64 {
    spectrum
        .energies()
        .enumerate()
        .map(|(i, e)| e * rho.elements[(i, i)].re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{overlap_matrix, solve_spectrum, ModelParams};

    fn model() -> ModelParams {
        ModelParams::electron_box()
    }

    #[test]
    fn zero_temperature_limit_is_ground_state() {
        let p = model();
        let s = solve_spectrum(&p, 0.0).unwrap();
        let bath = BathParams::new(1e-6, p.k_b).unwrap();
        let rho = gibbs_state(&s, &bath);
        assert_eq!(rho.population(1), 1.0);
        assert!(rho.populations()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn degenerate_pair_splits_evenly() {
        let p = model();
        let s = solve_spectrum(&p, p.alpha_from_coupling(1e15)).unwrap();
        let bath = BathParams::new(0.05, p.k_b).unwrap();
        let rho = gibbs_state(&s, &bath);
        assert!((rho.population(1) - 0.5).abs() < 1e-12);
        assert!((rho.population(2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bare_box_populations_from_closed_form() {
        // E1 = pi^2 hbar^2 / (8 m a^2) with CODATA constants, levels n^2 E1.
        let p = model();
        let e1 = std::f64::consts::PI.powi(2) * p.hbar.powi(2) / (8.0 * p.mass * p.half_width.powi(2));
        let x = e1 / (p.k_b * 0.1);
        assert!((x - 27.3).abs() < 0.05);
        let s = solve_spectrum(&p, 0.0).unwrap();
        let rho = gibbs_state(&s, &BathParams::new(0.1, p.k_b).unwrap());
        let ratio = rho.population(2) / rho.population(1);
        assert!((ratio / (-3.0 * x).exp() - 1.0).abs() < 1e-12);
        let ratio4 = rho.population(4) / rho.population(1);
        assert!((ratio4 / (-15.0 * x).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_temperature_rejected() {
        assert!(BathParams::new(0.0, 1.0).is_err());
        assert!(BathParams::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn identity_change_leaves_state_alone() {
        let p = model();
        let s = solve_spectrum(&p, 0.0).unwrap();
        let rho = gibbs_state(&s, &BathParams::new(0.3, p.k_b).unwrap());
        let out = transform(&rho, &BasisChange::identity(0.0, 4)).unwrap();
        assert_eq!(out.state, rho);
        assert_eq!(out.leaked, 0.0);
    }

    #[test]
    fn level_two_is_invariant_under_quench() {
        let p = model();
        let a = solve_spectrum(&p, p.alpha_from_coupling(0.2)).unwrap();
        let b = solve_spectrum(&p, p.alpha_from_coupling(30.0)).unwrap();
        let rho = DensityMatrix::pure_level(4, 2, a.alpha());
        let out = transform(&rho, &overlap_matrix(&p, &a, &b).unwrap()).unwrap();
        assert_eq!(out.state.elements, rho.elements);
        assert_eq!(out.state.basis_alpha, b.alpha());
    }

    #[test]
    fn first_quench_trace_deficit_is_small() {
        let p = model();
        let old = solve_spectrum(&p, 0.0).unwrap();
        let new = solve_spectrum(&p, p.bare_ground_energy() * p.half_width / 50.0).unwrap();
        let rho = gibbs_state(&old, &BathParams::new(0.1, p.k_b).unwrap());
        let out = transform(&rho, &overlap_matrix(&p, &old, &new).unwrap()).unwrap();
        // ground population ~1 times the quadrature leakage 9.950243202e-7
        assert!(out.leaked < 1e-6);
        assert!((out.leaked - 9.950_243_202e-7).abs() < 1e-10);
        assert_eq!(out.state.hermiticity_error(), 0.0);
    }

    #[test]
    fn basis_mismatch_rejected() {
        let p = model();
        let s = solve_spectrum(&p, 1e-30).unwrap();
        let rho = DensityMatrix::pure_level(4, 1, 0.0);
        assert!(matches!(internal_energy(&rho, &s), Err(Error::BasisMismatch { .. })));
        let change = BasisChange::identity(1e-30, 4);
        assert!(matches!(transform(&rho, &change), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn energies_of_simple_states() {
        let p = model();
        let s = solve_spectrum(&p, 0.0).unwrap();
        let e1 = s.energy(1);
        let ground = DensityMatrix::pure_level(4, 1, 0.0);
        assert_eq!(internal_energy(&ground, &s).unwrap(), e1);
        let mixed = DensityMatrix::from_populations(&[0.25; 4], 0.0);
        assert!((internal_energy(&mixed, &s).unwrap() / e1 - 7.5).abs() < 1e-13);
    }

    #[test]
    fn thermal_energy_matches_boltzmann_sum() {
        let p = model();
        let s = solve_spectrum(&p, 0.0).unwrap();
        let e1 = p.bare_ground_energy();
        let beta = 1.0 / (p.k_b * 0.1);
        let (mut num, mut den) = (0.0, 0.0);
        for n in 1..=4 {
            let e = (n * n) as f64 * e1;
            let w = (-beta * e).exp();
            num += e * w;
            den += w;
        }
        let rho = gibbs_state(&s, &BathParams::new(0.1, p.k_b).unwrap());
        let u = internal_energy(&rho, &s).unwrap();
        assert!((u / (num / den) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn integrity_catches_negative_eigenvalue() {
        let mut rho = DensityMatrix::from_populations(&[0.5, 0.5, 0.0, 0.0], 0.0);
        rho.elements[(0, 2)] = Complex64::new(0.1, 0.0);
        rho.elements[(2, 0)] = Complex64::new(0.1, 0.0);
        assert!(matches!(rho.check_integrity(1e-6), Err(Error::Integrity(_))));
        assert!(rho.min_eigenvalue() < -0.01);
        let ok = DensityMatrix::from_populations(&[0.5, 0.5, 0.0, 0.0], 0.0);
        ok.check_integrity(0.0).unwrap();
    }
}
