// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over the cycle speed `r` and the quench size `sigma`.
//!
//! Points are independent cycles and are evaluated on the current rayon pool.
//! Results come back in input order whatever the pool size, so a sweep run on
//! eight workers produces the same table as one run serially.

use std::collections::BTreeMap;
use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_cycle_with_schedule, CycleConfig, CycleLedger, QuenchSchedule};
use crate::error::{Error, Result};

/// Below this `sigma` a point only runs when long-running mode is enabled.
pub const LONG_RUNNING_SIGMA: f64 = 4.0;

/// Default per-point `r` cap in long-running mode.
pub const DEFAULT_LONG_RUNNING_R_CAP: u32 = 1_000_000;

/// Points on the coarse grid of [`max_power_search`].
pub const MAX_COARSE_POINTS: usize = 20;

/// One evaluated cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub r: u32,
    pub sigma: f64,
    pub w_over_ktc: f64,
    pub eta: f64,
    /// Power in units of 1e-18 W.
    pub p_attowatts: f64,
    /// J
    pub q_ins: f64,
    /// J
    pub q_hc: f64,
    /// J
    pub q_rem: f64,
    /// J
    pub q_ch: f64,
    pub n_steps: usize,
    pub leakage: f64,
    pub engine_flag: bool,
    /// Seconds spent on this point. Not part of the physics; excluded from
    /// [`SweepRecord::same_result`].
    pub wall_time: f64,
}

impl SweepRecord {
    pub fn from_ledger(config: &CycleConfig, ledger: &CycleLedger, wall_time: f64) -> Self {
        Self {
            r: config.steps_per_quench,
            sigma: config.sigma,
            w_over_ktc: ledger.w_total / config.cold_thermal_energy(),
            eta: ledger.efficiency,
            p_attowatts: ledger.power * 1e18,
            q_ins: ledger.q_ins,
            q_hc: ledger.q_hc,
            q_rem: ledger.q_rem,
            q_ch: ledger.q_ch,
            n_steps: ledger.n_steps,
            leakage: ledger.leakage,
            engine_flag: ledger.is_engine(),
            wall_time,
        }
    }

    /// Equality of everything except the wall time, bit for bit.
    pub fn same_result(&self, other: &Self) -> bool {
        let strip = |r: &Self| Self {
            wall_time: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

/// A grid point whose cycle aborted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub r: u32,
    pub sigma: f64,
    pub reason: String,
    #[serde(skip)]
    pub error: Error,
}

pub type PointResult = std::result::Result<SweepRecord, PointFailure>;

/// Ordered sweep output; failed points keep their slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub points: Vec<PointResult>,
}

impl SweepTable {
    pub fn records(&self) -> impl Iterator<Item = &SweepRecord> {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PointFailure> {
        self.points.iter().filter_map(|p| p.as_ref().err())
    }

    /// Same points in the same order with identical physics.
    pub fn same_results(&self, other: &Self) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|pair| match pair {
                (Ok(a), Ok(b)) => a.same_result(b),
                (Err(a), Err(b)) => a == b,
                _ => false,
            })
    }
}

/// Knobs shared by the sweep entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Permit `sigma < 4`, where an engine regime needs enormous `r`.
    pub allow_long_running: bool,
    /// Largest `r` evaluated in long-running mode.
    pub long_running_r_cap: u32,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            allow_long_running: false,
            long_running_r_cap: DEFAULT_LONG_RUNNING_R_CAP,
        }
    }
}

impl SweepOptions {
    fn check_sigma(&self, sigma: f64) -> Result<()> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if sigma < LONG_RUNNING_SIGMA && !self.allow_long_running {
            return Err(Error::Domain(format!(
                "sigma = {sigma} is below {LONG_RUNNING_SIGMA}; enable long-running mode to evaluate it"
            )));
        }
        Ok(())
    }

    /// Upper `r` limit for a point at `sigma`.
    fn r_cap(&self, sigma: f64) -> u32 {
        if sigma < LONG_RUNNING_SIGMA {
            self.long_running_r_cap
        } else {
            u32::MAX
        }
    }
}

fn with_sigma(config: &CycleConfig, sigma: f64) -> CycleConfig {
    CycleConfig { sigma, ..*config }
}

fn with_r(config: &CycleConfig, r: u32) -> CycleConfig {
    CycleConfig {
        steps_per_quench: r,
        ..*config
    }
}

fn evaluate(config: &CycleConfig, schedule: &QuenchSchedule) -> PointResult {
    let start = Instant::now();
    let outcome = run_cycle_with_schedule(config, schedule);
    let wall = start.elapsed().as_secs_f64();
    match outcome {
        Ok(ledger) => {
            debug!(
                "sigma = {}, r = {}: W = {:e} J in {wall:.2} s",
                config.sigma, config.steps_per_quench, ledger.w_total
            );
            Ok(SweepRecord::from_ledger(config, &ledger, wall))
        }
        Err(error) => Err(failure(config.steps_per_quench, config.sigma, error)),
    }
}

fn failure(r: u32, sigma: f64, error: Error) -> PointFailure {
    PointFailure {
        r,
        sigma,
        reason: error.to_string(),
        error,
    }
}

fn check_r_values(r_values: &[u32]) -> Result<()> {
    if r_values.is_empty() {
        return Err(Error::Domain("r list is empty".into()));
    }
    if r_values.contains(&0) {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    if r_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("r values must be given in ascending order".into()));
    }
    Ok(())
}

/// Evaluate every `r` at the schedule's `sigma`; a failed schedule fails
/// every point.
fn sweep_with_schedule(config: &CycleConfig, schedule: &Result<QuenchSchedule>, r_values: &[u32]) -> Vec<PointResult> {
    match schedule {
        Ok(s) => r_values
            .par_iter()
            .map(|&r| evaluate(&with_r(config, r), s))
            .collect(),
        Err(e) => r_values.iter().map(|&r| Err(failure(r, config.sigma, e.clone()))).collect(),
    }
}

/// One cycle per `r` at the configured `sigma`, in input order.
pub fn sweep_r(config: &CycleConfig, r_values: &[u32]) -> Result<SweepTable> {
    check_r_values(r_values)?;
    let schedule = QuenchSchedule::for_config(config);
    Ok(SweepTable {
        points: sweep_with_schedule(config, &schedule, r_values),
    })
}

/// Full `sigma x r` product, row-major: all `r` for the first `sigma`, then
/// the next.
pub fn contour_grid(config: &CycleConfig, r_values: &[u32], sigma_values: &[f64], options: &SweepOptions) -> Result<SweepTable> {
    check_r_values(r_values)?;
    if sigma_values.is_empty() {
        return Err(Error::Domain("sigma list is empty".into()));
    }
    for &sigma in sigma_values {
        options.check_sigma(sigma)?;
        if r_values[r_values.len() - 1] > options.r_cap(sigma) {
            return Err(Error::Domain(format!(
                "r = {} exceeds the long-running cap {} at sigma = {sigma}",
                r_values[r_values.len() - 1],
                options.r_cap(sigma)
            )));
        }
    }
    let rows: Vec<Vec<PointResult>> = sigma_values
        .par_iter()
        .map(|&sigma| {
            let c = with_sigma(config, sigma);
            let schedule = QuenchSchedule::for_config(&c);
            sweep_with_schedule(&c, &schedule, r_values)
        })
        .collect();
    Ok(SweepTable {
        points: rows.into_iter().flatten().collect(),
    })
}

/// At most `max_points` integers spread geometrically over `[lo, hi]`, both
/// ends included.
pub fn geometric_grid(lo: u32, hi: u32, max_points: usize) -> Vec<u32> {
    assert!(lo >= 1 && lo <= hi && max_points >= 2);
    let (l, h) = (lo as f64, hi as f64);
    let mut grid: Vec<u32> = (0..max_points)
        .map(|i| {
            let t = i as f64 / (max_points - 1) as f64;
            ((l.ln() + t * (h.ln() - l.ln())).exp().round() as u32).clamp(lo, hi)
        })
        .collect();
    grid[0] = lo;
    grid[max_points - 1] = hi;
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaxPower {
    Found {
        r_star: u32,
        record: SweepRecord,
        /// Every point evaluated during the search, sorted by `r`.
        evaluated: Vec<SweepRecord>,
    },
    /// No engine-regime point in the bracket.
    NotFound {
        evaluated: Vec<SweepRecord>,
        failures: Vec<PointFailure>,
    },
}

impl MaxPower {
    pub fn record(&self) -> Option<&SweepRecord> {
        match self {
            MaxPower::Found { record, .. } => Some(record),
            MaxPower::NotFound { .. } => None,
        }
    }

    pub fn r_star(&self) -> Option<u32> {
        self.record().map(|r| r.r)
    }
}

/// Memoized power evaluations at one `sigma`.
struct PowerProbe<'a> {
    config: &'a CycleConfig,
    schedule: &'a QuenchSchedule,
    seen: BTreeMap<u32, PointResult>,
}

impl PowerProbe<'_> {
    fn evaluate_all(&mut self, rs: &[u32]) {
        let fresh: Vec<u32> = rs.iter().copied().filter(|r| !self.seen.contains_key(r)).collect();
        let out: Vec<PointResult> = fresh
            .par_iter()
            .map(|&r| evaluate(&with_r(self.config, r), self.schedule))
            .collect();
        self.seen.extend(fresh.into_iter().zip(out));
    }

    /// Power, with failed points ranked below everything.
    fn power(&mut self, r: u32) -> f64 {
        self.evaluate_all(&[r]);
        match &self.seen[&r] {
            Ok(rec) => rec.p_attowatts,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn best(&self) -> Option<&SweepRecord> {
        // ties go to the smaller r (iteration order), keeping the result
        // independent of evaluation order
        self.seen
            .values()
            .filter_map(|p| p.as_ref().ok())
            .filter(|rec| rec.engine_flag)
            .fold(None, |best: Option<&SweepRecord>, rec| match best {
                Some(b) if b.p_attowatts >= rec.p_attowatts => Some(b),
                _ => Some(rec),
            })
    }
}

/// Maximize power over integer `r` in `[r_lo, r_hi]`: a geometric grid of at
/// most [`MAX_COARSE_POINTS`] points, then integer ternary search between the
/// neighbours of the best grid point.
pub fn max_power_search(config: &CycleConfig, r_lo: u32, r_hi: u32) -> Result<MaxPower> {
    if r_lo == 0 || r_lo >= r_hi {
        return Err(Error::Domain(format!("power search needs 1 <= r_lo < r_hi, got [{r_lo}, {r_hi}]")));
    }
    let schedule = QuenchSchedule::for_config(config)?;
    search_with_schedule(config, &schedule, r_lo, r_hi)
}

fn search_with_schedule(config: &CycleConfig, schedule: &QuenchSchedule, r_lo: u32, r_hi: u32) -> Result<MaxPower> {
    let mut probe = PowerProbe {
        config,
        schedule,
        seen: BTreeMap::new(),
    };
    let grid = geometric_grid(r_lo, r_hi, MAX_COARSE_POINTS);
    probe.evaluate_all(&grid);
    let Some(coarse_best) = probe.best().map(|r| r.r) else {
        let (evaluated, failures) = split(probe.seen);
        return Ok(MaxPower::NotFound { evaluated, failures });
    };
    let i = grid.iter().position(|&r| r == coarse_best).expect("best point is on the grid");
    let mut lo = grid[i.saturating_sub(1)];
    let mut hi = grid[(i + 1).min(grid.len() - 1)];
    info!("sigma = {}: coarse maximum at r = {coarse_best}, refining in [{lo}, {hi}]", config.sigma);
    while hi - lo > 2 {
        let third = (hi - lo) / 3;
        let (m1, m2) = (lo + third, hi - third);
        probe.evaluate_all(&[m1, m2]);
        if probe.power(m1) < probe.power(m2) {
            lo = m1 + 1;
        } else {
            hi = m2;
        }
    }
    probe.evaluate_all(&(lo..=hi).collect::<Vec<_>>());
    let record = probe.best().cloned().expect("coarse grid already had an engine point");
    let (evaluated, _) = split(probe.seen);
    Ok(MaxPower::Found {
        r_star: record.r,
        record,
        evaluated,
    })
}

fn split(seen: BTreeMap<u32, PointResult>) -> (Vec<SweepRecord>, Vec<PointFailure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for p in seen.into_values() {
        match p {
            Ok(r) => ok.push(r),
            Err(f) => failed.push(f),
        }
    }
    (ok, failed)
}

/// [`max_power_search`] per `sigma`, in input order. A `sigma` whose search
/// cannot even start (bad schedule) is reported as a failure of that entry.
pub fn sweep_sigma(
    config: &CycleConfig,
    sigma_values: &[f64],
    r_lo: u32,
    r_hi: u32,
    options: &SweepOptions,
) -> Result<Vec<(f64, std::result::Result<MaxPower, PointFailure>)>> {
    if sigma_values.is_empty() {
        return Err(Error::Domain("sigma list is empty".into()));
    }
    for &sigma in sigma_values {
        options.check_sigma(sigma)?;
    }
    Ok(sigma_values
        .par_iter()
        .map(|&sigma| {
            let c = with_sigma(config, sigma);
            let hi = r_hi.min(options.r_cap(sigma));
            let outcome = max_power_search(&c, r_lo, hi).map_err(|e| failure(hi, sigma, e));
            (sigma, outcome)
        })
        .collect())
}
