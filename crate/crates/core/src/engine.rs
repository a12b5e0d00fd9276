// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Four-stroke finite-time Stirling cycle.
//!
//! 1. Barrier insertion at `T_h`: repeated {sudden quench `alpha -> alpha +
//!    d_alpha`, `r` elementary thermalizations}.
//! 2. Instantaneous switch to the `T_c` Gibbs state at fixed spectrum.
//! 3. Barrier removal at `T_c`, the exact reverse schedule.
//! 4. Instantaneous switch back to the `T_h` Gibbs state at `alpha = 0`.
//!
//! Work is the energy change across a quench, heat the energy change while in
//! contact with a bath. The ledger reports work with the engine sign: a
//! positive `w_total` means work delivered by the working substance.

use log::warn;

use crate::error::{Error, Result};
use crate::lindblad::{thermalize, DissipatorConfig};
use crate::spectrum::{odd_root, overlap_matrix, BasisChange, ModelParams, Spectrum};
use crate::state::{energy_unchecked, gibbs_state, transform, BathParams, DensityMatrix};

/// Trajectory samples kept per stroke.
pub const MAX_TRAJECTORY_SAMPLES: usize = 10_000;

/// Leakage per stroke above which a warning is logged.
pub const LEAKAGE_WARNING: f64 = 1e-4;

/// Everything that defines one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub model: ModelParams,
    /// K
    pub hot_temperature: f64,
    /// K
    pub cold_temperature: f64,
    /// Quench size: `d_alpha = E_1(0) a / sigma`.
    pub sigma: f64,
    /// Elementary thermalizations per quench, `r`.
    pub steps_per_quench: u32,
    /// Insertion stops once `E_2 - E_1 <= gap_tolerance * k_B T_c`.
    pub gap_tolerance: f64,
    pub dissipator: DissipatorConfig,
    pub record_trajectory: bool,
    /// Upper bound on quenches per stroke.
    pub max_quench_steps: u64,
}

impl CycleConfig {
    /// Electron in a 40 nm box between 0.1 K and 0.05 K, `sigma = 50`,
    /// `r = 650`, `gamma_k = dw_k / 50`, `dtau = 2 pi hbar / (1e4 (E_4 - E_3))`.
    pub fn reference() -> Self {
        let model = ModelParams::electron_box();
        Self {
            model,
            hot_temperature: 0.1,
            cold_temperature: 0.05,
            sigma: 50.0,
            steps_per_quench: 650,
            gap_tolerance: 0.05,
            dissipator: DissipatorConfig::for_model(&model, 50.0, 10_000.0),
            record_trajectory: false,
            max_quench_steps: 10_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.dissipator.validate()?;
        if !(self.cold_temperature.is_finite() && self.cold_temperature > 0.0) {
            return Err(Error::Domain(format!(
                "T_c must be positive, got {} K",
                self.cold_temperature
            )));
        }
        if !(self.hot_temperature.is_finite() && self.hot_temperature > self.cold_temperature) {
            return Err(Error::Domain(format!(
                "T_h must exceed T_c, got T_h = {} K, T_c = {} K",
                self.hot_temperature, self.cold_temperature
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.steps_per_quench == 0 {
            return Err(Error::Domain("r must be at least 1".into()));
        }
        if !(self.gap_tolerance > 0.0 && self.gap_tolerance < 1.0) {
            return Err(Error::Domain(format!(
                "gap tolerance must lie in (0, 1), got {}",
                self.gap_tolerance
            )));
        }
        if self.max_quench_steps == 0 {
            return Err(Error::Domain("quench step cap must be positive".into()));
        }
        Ok(())
    }

    /// Barrier increment per quench, J m.
    pub fn delta_alpha(&self) -> f64 {
        self.model.bare_ground_energy() * self.model.half_width / self.sigma
    }

    /// Gap at which insertion is considered complete, J.
    pub fn gap_limit(&self) -> f64 {
        self.gap_tolerance * self.model.k_b * self.cold_temperature
    }

    pub fn hot_bath(&self) -> Result<BathParams> {
        BathParams::new(self.hot_temperature, self.model.k_b)
    }

    pub fn cold_bath(&self) -> Result<BathParams> {
        BathParams::new(self.cold_temperature, self.model.k_b)
    }

    /// `k_B T_c`, J.
    pub fn cold_thermal_energy(&self) -> f64 {
        self.model.k_b * self.cold_temperature
    }
}

/// Barrier strengths `alpha_j = j d_alpha`, `j = 0..=n`, with the odd-level
/// roots solved once. Independent of `r` and of the bath couplings, so one
/// schedule serves every `r` of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSchedule {
    model: ModelParams,
    delta_alpha: f64,
    gap_limit: f64,
    odd_roots: Vec<f64>,
    n_steps: usize,
}

impl QuenchSchedule {
    pub fn build(model: ModelParams, delta_alpha: f64, gap_limit: f64, cap: u64) -> Result<Self> {
        model.validate()?;
        if !(delta_alpha.is_finite() && delta_alpha > 0.0) {
            return Err(Error::Domain(format!("barrier increment must be positive, got {delta_alpha:e}")));
        }
        let half = model.n_max / 2;
        let top_even = model.energy_of_root(std::f64::consts::PI);
        let mut odd_roots = Vec::with_capacity(half * 1024);
        for p in 1..=half {
            odd_roots.push(odd_root(0.0, p)?);
        }
        let mut j: u64 = 0;
        loop {
            j += 1;
            if j > cap {
                return Err(Error::StepCap { cap });
            }
            let g = model.coupling(j as f64 * delta_alpha);
            let first = odd_roots.len();
            for p in 1..=half {
                odd_roots.push(odd_root(g, p)?);
            }
            if top_even - model.energy_of_root(odd_roots[first]) <= gap_limit {
                break;
            }
        }
        Ok(Self {
            model,
            delta_alpha,
            gap_limit,
            odd_roots,
            n_steps: j as usize,
        })
    }

    /// Number of quenches [`QuenchSchedule::build`] would produce, found by
    /// bisection on `j` (the ground gap shrinks monotonically with `alpha`)
    /// without storing the roots.
    pub fn count_steps(model: ModelParams, delta_alpha: f64, gap_limit: f64, cap: u64) -> Result<u64> {
        model.validate()?;
        if !(delta_alpha.is_finite() && delta_alpha > 0.0) {
            return Err(Error::Domain(format!("barrier increment must be positive, got {delta_alpha:e}")));
        }
        let top_even = model.energy_of_root(std::f64::consts::PI);
        let closed = |j: u64| -> Result<bool> {
            let y = odd_root(model.coupling(j as f64 * delta_alpha), 1)?;
            Ok(top_even - model.energy_of_root(y) <= gap_limit)
        };
        let mut hi: u64 = 1;
        while !closed(hi)? {
            if hi >= cap {
                return Err(Error::StepCap { cap });
            }
            hi = (hi * 2).min(cap);
        }
        let mut lo = hi / 2; // not closed (or zero)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if closed(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    pub fn for_config(config: &CycleConfig) -> Result<Self> {
        config.validate()?;
        Self::build(
            config.model,
            config.delta_alpha(),
            config.gap_limit(),
            config.max_quench_steps,
        )
    }

    /// Whether this schedule is the one `config` would build.
    pub fn matches(&self, config: &CycleConfig) -> bool {
        self.model == config.model
            && self.delta_alpha == config.delta_alpha()
            && self.gap_limit == config.gap_limit()
    }

    /// Quenches per stroke, `n_dt`.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn delta_alpha(&self) -> f64 {
        self.delta_alpha
    }

    pub fn alpha(&self, j: usize) -> f64 {
        j as f64 * self.delta_alpha
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha(self.n_steps)
    }

    /// Spectrum at `alpha_j`.
    pub fn spectrum(&self, j: usize) -> Spectrum {
        let half = self.model.n_max / 2;
        Spectrum::from_odd_roots(self.model, self.alpha(j), &self.odd_roots[j * half..(j + 1) * half])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrokeDirection {
    Insert,
    Remove,
}

/// Snapshot taken after the thermalization of a quench step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    /// 1-based quench index within the stroke.
    pub step: usize,
    /// J m
    pub alpha: f64,
    pub populations: Vec<f64>,
    /// `|p_13|`, zero when fewer than three levels are kept.
    pub coherence_13: f64,
    /// Cumulative work done on the system, J (raw sign).
    pub work_on: f64,
    /// Cumulative heat absorbed, J.
    pub heat: f64,
    /// `Tr[H rho]`, J.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrokeOutcome {
    pub end: DensityMatrix,
    /// Total work done on the system, J.
    pub work_on: f64,
    /// Total heat absorbed from the bath, J.
    pub heat: f64,
    pub n_steps: usize,
    /// Trace lost to truncation over the stroke.
    pub leakage: f64,
    pub trajectory: Vec<TrajectorySample>,
}

/// Apply one quench. Returns the re-expressed state, the work done on the
/// system and the leaked trace.
fn apply_quench(rho: &DensityMatrix, old: &Spectrum, new: &Spectrum) -> Result<(DensityMatrix, f64, f64)> {
    let change = overlap_matrix(old.params(), old, new)?;
    let before = energy_unchecked(rho, old);
    let out = transform(rho, &change)?;
    let after = energy_unchecked(&out.state, new);
    Ok((out.state, after - before, out.leaked))
}

/// `Tr[H_new S rho S^T] - Tr[H_old rho]`, J.
pub fn quench_work(rho_before: &DensityMatrix, old: &Spectrum, new: &Spectrum, change: &BasisChange) -> Result<f64> {
    if rho_before.basis_alpha != old.alpha() {
        return Err(Error::BasisMismatch {
            expected: old.alpha(),
            found: rho_before.basis_alpha,
        });
    }
    if change.alpha_old != old.alpha() || change.alpha_new != new.alpha() {
        return Err(Error::BasisMismatch {
            expected: new.alpha(),
            found: change.alpha_new,
        });
    }
    let out = transform(rho_before, change)?;
    Ok(energy_unchecked(&out.state, new) - energy_unchecked(rho_before, old))
}

/// Insert or remove the barrier while in contact with `bath`.
pub fn barrier_stroke(
    start: &DensityMatrix,
    bath: &BathParams,
    direction: StrokeDirection,
    config: &CycleConfig,
    schedule: &QuenchSchedule,
) -> Result<StrokeOutcome> {
    if !schedule.matches(config) {
        return Err(Error::Domain("quench schedule was built for a different configuration".into()));
    }
    let n = schedule.n_steps();
    let (first, expected_alpha) = match direction {
        StrokeDirection::Insert => (0, 0.0),
        StrokeDirection::Remove => (n, schedule.alpha_max()),
    };
    if start.basis_alpha != expected_alpha {
        return Err(Error::BasisMismatch {
            expected: expected_alpha,
            found: start.basis_alpha,
        });
    }
    let stride = n.div_ceil(MAX_TRAJECTORY_SAMPLES).max(1);

    let mut rho = start.clone();
    let mut old = schedule.spectrum(first);
    let (mut work_on, mut heat, mut leakage) = (0.0, 0.0, 0.0);
    let mut trajectory = Vec::new();
    for step in 1..=n {
        let j = match direction {
            StrokeDirection::Insert => step,
            StrokeDirection::Remove => n - step,
        };
        let new = schedule.spectrum(j);
        let (quenched, dw, leaked) = apply_quench(&rho, &old, &new)?;
        work_on += dw;
        leakage += leaked;
        let th = thermalize(&quenched, &new, bath, config.steps_per_quench, &config.dissipator)?;
        heat += th.heat;
        rho = th.state;
        if config.record_trajectory && (step % stride == 0 || step == n) {
            trajectory.push(TrajectorySample {
                step,
                alpha: new.alpha(),
                populations: rho.populations(),
                coherence_13: if rho.dim() >= 3 { rho.element(1, 3).norm() } else { 0.0 },
                work_on,
                heat,
                energy: energy_unchecked(&rho, &new),
            });
        }
        old = new;
    }
    // each quench and thermalization rounds the trace at the `dim * eps`
    // level; that allowance is added to the measured leakage
    let rounding = n as f64 * rho.dim() as f64 * f64::EPSILON;
    rho.check_integrity(leakage + 1e-12 + rounding)?;
    if leakage > LEAKAGE_WARNING {
        warn!(
            "{:?} stroke leaked {leakage:e} of the trace (sigma = {}, r = {})",
            direction, config.sigma, config.steps_per_quench
        );
    }
    Ok(StrokeOutcome {
        end: rho,
        work_on,
        heat,
        n_steps: n,
        leakage,
        trajectory,
    })
}

/// Instantaneous bath exchange at fixed spectrum: returns the new Gibbs state
/// and the heat absorbed `Tr[H (rho_gibbs - rho_end)]`.
pub fn isochoric_switch(end_state: &DensityMatrix, spectrum: &Spectrum, new_bath: &BathParams) -> Result<(DensityMatrix, f64)> {
    if end_state.basis_alpha != spectrum.alpha() {
        return Err(Error::BasisMismatch {
            expected: spectrum.alpha(),
            found: end_state.basis_alpha,
        });
    }
    let gibbs = gibbs_state(spectrum, new_bath);
    let heat = energy_unchecked(&gibbs, spectrum) - energy_unchecked(end_state, spectrum);
    Ok((gibbs, heat))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrajectory {
    pub insert: Vec<TrajectorySample>,
    pub remove: Vec<TrajectorySample>,
}

/// Thermodynamic bookkeeping of one cycle. Heats are positive when absorbed
/// by the working substance; works carry the engine sign.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleLedger {
    pub w_ins: f64,
    pub w_rem: f64,
    pub q_ins: f64,
    pub q_hc: f64,
    pub q_rem: f64,
    pub q_ch: f64,
    pub w_total: f64,
    pub q_total: f64,
    pub efficiency: f64,
    /// W
    pub power: f64,
    /// Quenches per barrier stroke.
    pub n_steps: usize,
    /// Trace lost to truncation over both barrier strokes.
    pub leakage: f64,
    /// J m
    pub alpha_max: f64,
    /// Duration of the two barrier strokes, `2 r n dtau`, s.
    pub stroke_time: f64,
    /// State after the fourth stroke.
    pub final_state: DensityMatrix,
    pub trajectory: Option<CycleTrajectory>,
}

impl CycleLedger {
    /// Positive net work output.
    pub fn is_engine(&self) -> bool {
        self.w_total > 0.0
    }

    /// `W_total - Q_total`, J.
    pub fn first_law_residual(&self) -> f64 {
        self.w_total - self.q_total
    }
}

/// Run the full cycle from `Gibbs(alpha = 0, T_h)`.
pub fn run_cycle(config: &CycleConfig) -> Result<CycleLedger> {
    let schedule = QuenchSchedule::for_config(config)?;
    run_cycle_with_schedule(config, &schedule)
}

/// [`run_cycle`] with a prebuilt schedule.
pub fn run_cycle_with_schedule(config: &CycleConfig, schedule: &QuenchSchedule) -> Result<CycleLedger> {
    config.validate()?;
    let hot = config.hot_bath()?;
    let cold = config.cold_bath()?;
    let bare = schedule.spectrum(0);
    let top = schedule.spectrum(schedule.n_steps());

    let start = gibbs_state(&bare, &hot);
    let insert = barrier_stroke(&start, &hot, StrokeDirection::Insert, config, schedule)?;
    let (cold_state, q_hc) = isochoric_switch(&insert.end, &top, &cold)?;
    let remove = barrier_stroke(&cold_state, &cold, StrokeDirection::Remove, config, schedule)?;
    let (final_state, q_ch) = isochoric_switch(&remove.end, &bare, &hot)?;

    let w_ins = -insert.work_on;
    let w_rem = -remove.work_on;
    let w_total = w_ins + w_rem;
    let q_total = insert.heat + q_hc + remove.heat + q_ch;
    let absorbed = q_ch + insert.heat;
    let efficiency = if absorbed > 0.0 {
        1.0 + (q_hc + remove.heat) / absorbed
    } else {
        0.0
    };
    let n = schedule.n_steps();
    let stroke_time = 2.0 * config.steps_per_quench as f64 * n as f64 * config.dissipator.delta_tau;
    Ok(CycleLedger {
        w_ins,
        w_rem,
        q_ins: insert.heat,
        q_hc,
        q_rem: remove.heat,
        q_ch,
        w_total,
        q_total,
        efficiency,
        power: w_total / stroke_time,
        n_steps: n,
        leakage: insert.leakage + remove.leakage,
        alpha_max: schedule.alpha_max(),
        stroke_time,
        final_state,
        trajectory: config.record_trajectory.then(|| CycleTrajectory {
            insert: insert.trajectory,
            remove: remove.trajectory,
        }),
    })
}
