// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Result tables and run manifests.
//!
//! Every command writes the same CSV schema. Floats carry 17 significant
//! digits (enough to recover the exact `f64`), rounded half-to-even on the
//! exact binary value, and lines end in LF.

use std::io::{Read, Write};

use qstirling::constants::{CODATA_RELEASE, ELECTRON_MASS, HBAR, K_B};
use qstirling::engine::{CycleConfig, QuenchSchedule};
use qstirling::sweep::{PointFailure, SweepRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{serialize_config, ResolvedConfig};

pub const CSV_HEADER: [&str; 12] = [
    "r",
    "sigma",
    "W_over_kTc",
    "eta",
    "P_attowatts",
    "Q_ins_J",
    "Q_hc_J",
    "Q_rem_J",
    "Q_ch_J",
    "n_steps",
    "leakage",
    "engine_flag",
];

/// Gap tolerances tabulated in every manifest besides the configured one.
pub const SENSITIVITY_TOLERANCES: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Schema(String),
}

/// 17 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub r: u32,
    pub sigma: f64,
    pub w_over_ktc: f64,
    pub eta: f64,
    pub p_attowatts: f64,
    pub q_ins: f64,
    pub q_hc: f64,
    pub q_rem: f64,
    pub q_ch: f64,
    pub n_steps: usize,
    pub leakage: f64,
    pub engine_flag: bool,
}

impl From<&SweepRecord> for Row {
    fn from(r: &SweepRecord) -> Self {
        Self {
            r: r.r,
            sigma: r.sigma,
            w_over_ktc: r.w_over_ktc,
            eta: r.eta,
            p_attowatts: r.p_attowatts,
            q_ins: r.q_ins,
            q_hc: r.q_hc,
            q_rem: r.q_rem,
            q_ch: r.q_ch,
            n_steps: r.n_steps,
            leakage: r.leakage,
            engine_flag: r.engine_flag,
        }
    }
}

pub fn write_csv<'a, W: Write>(out: W, rows: impl IntoIterator<Item = &'a SweepRecord>) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for rec in rows {
        w.write_record([
            rec.r.to_string(),
            format_float(rec.sigma),
            format_float(rec.w_over_ktc),
            format_float(rec.eta),
            format_float(rec.p_attowatts),
            format_float(rec.q_ins),
            format_float(rec.q_hc),
            format_float(rec.q_rem),
            format_float(rec.q_ch),
            rec.n_steps.to_string(),
            format_float(rec.leakage),
            rec.engine_flag.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<'a>(rows: impl IntoIterator<Item = &'a SweepRecord>) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Read a table written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(ReportError::Schema(format!(
            "header {:?} differs from {:?}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |k: usize| ReportError::Schema(format!("row {}: bad {} '{}'", i + 1, CSV_HEADER[k], field(k)));
        let float = |k: usize| field(k).parse::<f64>().map_err(|_| bad(k));
        rows.push(Row {
            r: field(0).parse().map_err(|_| bad(0))?,
            sigma: float(1)?,
            w_over_ktc: float(2)?,
            eta: float(3)?,
            p_attowatts: float(4)?,
            q_ins: float(5)?,
            q_hc: float(6)?,
            q_rem: float(7)?,
            q_ch: float(8)?,
            n_steps: field(9).parse().map_err(|_| bad(9))?,
            leakage: float(10)?,
            engine_flag: field(11).parse().map_err(|_| bad(11))?,
        });
    }
    Ok(rows)
}

/// A number with its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

fn q(value: f64, unit: &str) -> Quantity {
    Quantity {
        value,
        unit: unit.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestConfig {
    pub hot_temperature: Quantity,
    pub cold_temperature: Quantity,
    pub half_width: Quantity,
    pub mass: Quantity,
    pub n_max: usize,
    pub sigma: f64,
    pub r: u32,
    pub gap_tolerance: f64,
    pub gamma_divisor: f64,
    pub dtau_divisor: f64,
    pub degenerate_gap_threshold: f64,
    pub coherence: String,
    pub max_quench_steps: u64,
    pub record_trajectory: bool,
}

impl From<&ResolvedConfig> for ManifestConfig {
    fn from(c: &ResolvedConfig) -> Self {
        Self {
            hot_temperature: q(c.hot_temperature, "K"),
            cold_temperature: q(c.cold_temperature, "K"),
            half_width: q(c.half_width, "m"),
            mass: q(c.mass, "kg"),
            n_max: c.n_max,
            sigma: c.sigma,
            r: c.r,
            gap_tolerance: c.gap_tolerance,
            gamma_divisor: c.gamma_divisor,
            dtau_divisor: c.dtau_divisor,
            degenerate_gap_threshold: c.degenerate_gap_threshold,
            coherence: c.coherence.as_str().into(),
            max_quench_steps: c.max_quench_steps,
            record_trajectory: c.record_trajectory,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub release: String,
    pub hbar: Quantity,
    pub k_b: Quantity,
    pub electron_mass: Quantity,
}

impl Constants {
    pub fn pinned() -> Self {
        Self {
            release: CODATA_RELEASE.into(),
            hbar: q(HBAR, "J s"),
            k_b: q(K_B, "J/K"),
            electron_mass: q(ELECTRON_MASS, "kg"),
        }
    }
}

/// Quantities fixed by the configuration rather than set directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub bare_ground_energy: Quantity,
    pub delta_tau: Quantity,
    pub delta_alpha: Quantity,
    pub gap_limit: Quantity,
    pub cold_thermal_energy: Quantity,
}

impl From<&CycleConfig> for Derived {
    fn from(c: &CycleConfig) -> Self {
        Self {
            bare_ground_energy: q(c.model.bare_ground_energy(), "J"),
            delta_tau: q(c.dissipator.delta_tau, "s"),
            delta_alpha: q(c.delta_alpha(), "J m"),
            gap_limit: q(c.gap_limit(), "J"),
            cold_thermal_energy: q(c.cold_thermal_energy(), "J"),
        }
    }
}

/// Insertion length for one gap tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSensitivity {
    pub sigma: f64,
    pub gap_tolerance: f64,
    /// `None` when the step cap is hit.
    pub n_steps: Option<u64>,
    pub alpha_max: Option<Quantity>,
    /// Dimensionless barrier strength at the end of insertion.
    pub g_max: Option<f64>,
}

/// Insertion length at `sigma` for each tolerance in
/// [`SENSITIVITY_TOLERANCES`] plus the configured one, ascending.
pub fn gap_sensitivity(config: &CycleConfig, sigmas: &[f64]) -> Vec<GapSensitivity> {
    let mut tolerances: Vec<f64> = SENSITIVITY_TOLERANCES.to_vec();
    if !tolerances.contains(&config.gap_tolerance) {
        tolerances.push(config.gap_tolerance);
    }
    tolerances.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for &sigma in sigmas {
        for &tol in &tolerances {
            let c = CycleConfig {
                sigma,
                gap_tolerance: tol,
                ..*config
            };
            let n = QuenchSchedule::count_steps(c.model, c.delta_alpha(), c.gap_limit(), c.max_quench_steps).ok();
            let alpha = n.map(|n| n as f64 * c.delta_alpha());
            out.push(GapSensitivity {
                sigma,
                gap_tolerance: tol,
                n_steps: n,
                alpha_max: alpha.map(|a| q(a, "J m")),
                g_max: alpha.map(|a| c.model.coupling(a)),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// A point that produced no row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub r: u32,
    pub sigma: f64,
    pub reason: String,
}

impl From<&PointFailure> for FailureEntry {
    fn from(f: &PointFailure) -> Self {
        Self {
            r: f.r,
            sigma: f.sigma,
            reason: f.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: ManifestConfig,
    /// sha256 of the canonical serialized configuration.
    pub config_digest: String,
    pub input_file: Option<InputFile>,
    pub constants: Constants,
    pub derived: Derived,
    pub r_values: Vec<u32>,
    pub sigma_values: Vec<f64>,
    pub rows: usize,
    pub failures: Vec<FailureEntry>,
    /// sigma values whose power search found no engine regime.
    pub no_engine_sigmas: Vec<f64>,
    pub gap_tolerance_sensitivity: Vec<GapSensitivity>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of the resolved configuration: equal iff every resolved value is
/// equal, because the canonical text form round-trips.
pub fn config_digest(c: &ResolvedConfig) -> String {
    sha256_hex(serialize_config(c).as_bytes())
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }
}
