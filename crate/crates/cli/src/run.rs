// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Command dispatch: read the configuration, run the simulation, write the
//! table and the manifest, map the outcome to an exit status.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use qstirling::engine::CycleConfig;
use qstirling::sweep::{
    contour_grid, sweep_r, sweep_sigma, MaxPower, PointFailure, SweepOptions, SweepRecord, DEFAULT_LONG_RUNNING_R_CAP,
};
use qstirling::Error;

use crate::config::{parse_config, ResolvedConfig};
use crate::report::{
    config_digest, csv_string, gap_sensitivity, sha256_hex, timestamp, Constants, Derived, FailureEntry, InputFile,
    ManifestConfig, RunManifest,
};

/// Geometric `r` grid used when none is given.
pub const DEFAULT_R_VALUES: [u32; 15] = [
    1, 2, 5, 10, 20, 50, 100, 200, 500, 1_000, 2_000, 5_000, 10_000, 20_000, 50_000,
];

/// `sigma` values used when none are given.
pub const DEFAULT_SIGMA_VALUES: [f64; 4] = [100.0, 50.0, 25.0, 10.0];

pub const DEFAULT_R_LO: u32 = 100;
pub const DEFAULT_R_HI: u32 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Cycle,
    SweepR,
    SweepSigma,
    Contour,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cycle => "cycle",
            Command::SweepR => "sweep-r",
            Command::SweepSigma => "sweep-sigma",
            Command::Contour => "contour",
        }
    }
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    /// A point failed for a reason other than state integrity.
    RunFailure = 1,
    /// Bad command line or configuration.
    Parse = 2,
    /// A density matrix lost positivity, hermiticity or trace.
    Integrity = 3,
    /// A power search found no engine regime.
    NoEngine = 4,
    Io = 5,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    /// Defaults to `<out>.manifest.json`.
    pub manifest: Option<PathBuf>,
    pub r_values: Option<Vec<u32>>,
    pub sigma_values: Option<Vec<f64>>,
    pub r_lo: u32,
    pub r_hi: u32,
    pub allow_long_running: bool,
    pub r_cap: u32,
}

impl Request {
    pub fn new(command: Command, out: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config: None,
            out: out.into(),
            manifest: None,
            r_values: None,
            sigma_values: None,
            r_lo: DEFAULT_R_LO,
            r_hi: DEFAULT_R_HI,
            allow_long_running: false,
            r_cap: DEFAULT_LONG_RUNNING_R_CAP,
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.manifest.clone().unwrap_or_else(|| {
            let mut p = self.out.clone().into_os_string();
            p.push(".manifest.json");
            p.into()
        })
    }
}

/// Final status plus a one-line explanation for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub message: String,
}

fn outcome(status: Status, message: impl Into<String>) -> Outcome {
    Outcome {
        status,
        message: message.into(),
    }
}

struct Loaded {
    resolved: ResolvedConfig,
    cycle: CycleConfig,
    input: Option<InputFile>,
}

fn load(path: Option<&Path>) -> Result<Loaded, Outcome> {
    let (text, input) = match path {
        None => (String::new(), None),
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| outcome(Status::Io, format!("cannot read {}: {e}", p.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| outcome(Status::Parse, format!("{} is not UTF-8", p.display())))?;
            let input = InputFile {
                path: p.display().to_string(),
                sha256: sha256_hex(&bytes),
            };
            (text, Some(input))
        }
    };
    let resolved = parse_config(&text).map_err(|e| {
        let origin = path.map(|p| p.display().to_string()).unwrap_or_else(|| "defaults".into());
        outcome(Status::Parse, format!("{origin}: {e}"))
    })?;
    let cycle = resolved
        .cycle_config()
        .map_err(|e| outcome(Status::Parse, e.to_string()))?;
    Ok(Loaded { resolved, cycle, input })
}

/// What a command produced before serialization.
struct Produced {
    records: Vec<SweepRecord>,
    failures: Vec<PointFailure>,
    no_engine: Vec<f64>,
    r_values: Vec<u32>,
    sigma_values: Vec<f64>,
}

fn status_of(error: &Error) -> Status {
    match error {
        Error::Integrity(_) => Status::Integrity,
        _ => Status::RunFailure,
    }
}

fn execute(req: &Request, loaded: &mut Loaded) -> Result<Produced, Outcome> {
    let options = SweepOptions {
        allow_long_running: req.allow_long_running,
        long_running_r_cap: req.r_cap,
    };
    let usage = |e: Error| outcome(Status::Parse, e.to_string());
    let sigma = loaded.cycle.sigma;
    if matches!(req.command, Command::Cycle | Command::SweepR) && req.sigma_values.is_some() {
        return Err(outcome(
            Status::Parse,
            format!("{} runs at the configured sigma; set it in the config file", req.command.name()),
        ));
    }
    match req.command {
        Command::Cycle => {
            if let Some(rs) = &req.r_values {
                let [r] = rs.as_slice() else {
                    return Err(outcome(Status::Parse, "cycle takes a single --r value"));
                };
                loaded.resolved.r = *r;
                loaded.cycle = loaded.resolved.cycle_config().map_err(|e| outcome(Status::Parse, e.to_string()))?;
            }
            let r = loaded.cycle.steps_per_quench;
            let table = sweep_r(&loaded.cycle, &[r]).map_err(usage)?;
            Ok(Produced {
                records: table.records().cloned().collect(),
                failures: table.failures().cloned().collect(),
                no_engine: Vec::new(),
                r_values: vec![r],
                sigma_values: vec![sigma],
            })
        }
        Command::SweepR => {
            let rs = req.r_values.clone().unwrap_or_else(|| DEFAULT_R_VALUES.to_vec());
            let table = sweep_r(&loaded.cycle, &rs).map_err(usage)?;
            Ok(Produced {
                records: table.records().cloned().collect(),
                failures: table.failures().cloned().collect(),
                no_engine: Vec::new(),
                r_values: rs,
                sigma_values: vec![sigma],
            })
        }
        Command::Contour => {
            let rs = req.r_values.clone().unwrap_or_else(|| DEFAULT_R_VALUES.to_vec());
            let sigmas = req.sigma_values.clone().unwrap_or_else(|| DEFAULT_SIGMA_VALUES.to_vec());
            let table = contour_grid(&loaded.cycle, &rs, &sigmas, &options).map_err(usage)?;
            Ok(Produced {
                records: table.records().cloned().collect(),
                failures: table.failures().cloned().collect(),
                no_engine: Vec::new(),
                r_values: rs,
                sigma_values: sigmas,
            })
        }
        Command::SweepSigma => {
            let sigmas = req.sigma_values.clone().unwrap_or_else(|| DEFAULT_SIGMA_VALUES.to_vec());
            let results = sweep_sigma(&loaded.cycle, &sigmas, req.r_lo, req.r_hi, &options).map_err(usage)?;
            let mut produced = Produced {
                records: Vec::new(),
                failures: Vec::new(),
                no_engine: Vec::new(),
                r_values: vec![req.r_lo, req.r_hi],
                sigma_values: sigmas,
            };
            for (sigma, result) in results {
                match result {
                    Ok(MaxPower::Found { record, .. }) => produced.records.push(record),
                    Ok(MaxPower::NotFound { failures, .. }) => {
                        produced.no_engine.push(sigma);
                        produced.failures.extend(failures);
                    }
                    Err(f) => produced.failures.push(f),
                }
            }
            Ok(produced)
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Outcome> {
    fs::write(path, contents).map_err(|e| outcome(Status::Io, format!("cannot write {}: {e}", path.display())))
}

/// Run one command end to end.
pub fn run(req: &Request) -> Outcome {
    let started_at = timestamp();
    let mut loaded = match load(req.config.as_deref()) {
        Ok(l) => l,
        Err(o) => return o,
    };
    info!("{} with sigma = {}, r = {}", req.command.name(), loaded.cycle.sigma, loaded.cycle.steps_per_quench);
    let produced = match execute(req, &mut loaded) {
        Ok(p) => p,
        Err(o) => return o,
    };

    if let Err(o) = write(&req.out, &csv_string(&produced.records)) {
        return o;
    }
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: req.command.name().into(),
        config: ManifestConfig::from(&loaded.resolved),
        config_digest: config_digest(&loaded.resolved),
        input_file: loaded.input.clone(),
        constants: Constants::pinned(),
        derived: Derived::from(&loaded.cycle),
        r_values: produced.r_values.clone(),
        sigma_values: produced.sigma_values.clone(),
        rows: produced.records.len(),
        failures: produced.failures.iter().map(FailureEntry::from).collect(),
        no_engine_sigmas: produced.no_engine.clone(),
        gap_tolerance_sensitivity: gap_sensitivity(&loaded.cycle, &produced.sigma_values),
        started_at,
        finished_at: timestamp(),
    };
    let json = match manifest.to_json() {
        Ok(j) => j,
        Err(e) => return outcome(Status::Io, e.to_string()),
    };
    if let Err(o) = write(&req.manifest_path(), &json) {
        return o;
    }

    for f in &produced.failures {
        warn!("sigma = {}, r = {} failed: {}", f.sigma, f.r, f.reason);
    }
    if let Some(f) = produced.failures.iter().find(|f| status_of(&f.error) == Status::Integrity) {
        return outcome(Status::Integrity, format!("sigma = {}, r = {}: {}", f.sigma, f.r, f.reason));
    }
    if let Some(f) = produced.failures.first() {
        return outcome(Status::RunFailure, format!("sigma = {}, r = {}: {}", f.sigma, f.r, f.reason));
    }
    if !produced.no_engine.is_empty() {
        return outcome(
            Status::NoEngine,
            format!("no engine regime in [{}, {}] for sigma = {:?}", req.r_lo, req.r_hi, produced.no_engine),
        );
    }
    outcome(Status::Success, format!("{} rows written to {}", produced.records.len(), req.out.display()))
}
