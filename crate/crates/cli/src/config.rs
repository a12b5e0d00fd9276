// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration files.
//!
//! One `key = value [unit]` per line, `#` starts a comment. Dimensional keys
//! require a unit; every key may appear at most once and unknown keys are
//! rejected. Anything not given takes the reference value:
//!
//! ```text
//! T_h = 0.1 K                     # K | mK
//! T_c = 50 mK
//! a = 20 nm                       # m | nm   (box half-width)
//! m = 1 m_e                       # kg | m_e
//! n_max = 4
//! sigma = 50
//! r = 650
//! gap_tolerance = 0.05
//! gamma_divisor = 50
//! dtau_divisor = 10000
//! degenerate_gap_threshold = 1e-6
//! coherence = exact-phase         # exact-phase | drop-coherences
//! max_quench_steps = 10000000
//! record_trajectory = false
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qstirling::constants::ELECTRON_MASS;
use qstirling::engine::CycleConfig;
use qstirling::{CoherenceMode, DissipatorConfig, ModelParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

/// Every knob of a run after defaulting, in SI base units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    /// K
    pub hot_temperature: f64,
    /// K
    pub cold_temperature: f64,
    /// m
    pub half_width: f64,
    /// kg
    pub mass: f64,
    pub n_max: usize,
    pub sigma: f64,
    pub r: u32,
    pub gap_tolerance: f64,
    pub gamma_divisor: f64,
    pub dtau_divisor: f64,
    pub degenerate_gap_threshold: f64,
    pub coherence: CoherenceMode,
    pub max_quench_steps: u64,
    pub record_trajectory: bool,
}

impl Default for ResolvedConfig {
    fn default() -> Self {
        let reference = CycleConfig::reference();
        Self {
            hot_temperature: reference.hot_temperature,
            cold_temperature: reference.cold_temperature,
            half_width: reference.model.half_width,
            mass: reference.model.mass,
            n_max: reference.model.n_max,
            sigma: reference.sigma,
            r: reference.steps_per_quench,
            gap_tolerance: reference.gap_tolerance,
            gamma_divisor: reference.dissipator.gamma_divisor,
            dtau_divisor: 10_000.0,
            degenerate_gap_threshold: reference.dissipator.degenerate_gap_threshold,
            coherence: reference.dissipator.coherence,
            max_quench_steps: reference.max_quench_steps,
            record_trajectory: reference.record_trajectory,
        }
    }
}

impl ResolvedConfig {
    /// The engine configuration, validated.
    pub fn cycle_config(&self) -> Result<CycleConfig, ConfigError> {
        let model = ModelParams::new(self.half_width, self.mass, self.n_max)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.dtau_divisor.is_finite() && self.dtau_divisor > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "dtau_divisor must be positive, got {}",
                self.dtau_divisor
            )));
        }
        let mut dissipator = DissipatorConfig::for_model(&model, self.gamma_divisor, self.dtau_divisor);
        dissipator.degenerate_gap_threshold = self.degenerate_gap_threshold;
        dissipator.coherence = self.coherence;
        let config = CycleConfig {
            model,
            hot_temperature: self.hot_temperature,
            cold_temperature: self.cold_temperature,
            sigma: self.sigma,
            steps_per_quench: self.r,
            gap_tolerance: self.gap_tolerance,
            dissipator,
            record_trajectory: self.record_trajectory,
            max_quench_steps: self.max_quench_steps,
        };
        config.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(config)
    }
}

const KEYS: &[&str] = &[
    "T_h",
    "T_c",
    "a",
    "m",
    "n_max",
    "sigma",
    "r",
    "gap_tolerance",
    "gamma_divisor",
    "dtau_divisor",
    "degenerate_gap_threshold",
    "coherence",
    "max_quench_steps",
    "record_trajectory",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
    unit: Option<&'a str>,
}

impl Entry<'_> {
    fn number(&self) -> Result<f64, ConfigError> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| at(self.line, format!("'{}' is not a number", self.value)))?;
        if !v.is_finite() {
            return Err(at(self.line, format!("'{}' is not finite", self.value)));
        }
        Ok(v)
    }

    fn integer<T: std::str::FromStr>(&self) -> Result<T, ConfigError> {
        self.value
            .parse()
            .map_err(|_| at(self.line, format!("'{}' is not a non-negative integer in range", self.value)))
    }

    fn unitless(&self, key: &str) -> Result<(), ConfigError> {
        match self.unit {
            None => Ok(()),
            Some(u) => Err(at(self.line, format!("{key} is dimensionless, found unit '{u}'"))),
        }
    }

    /// Value converted to the base unit; `units` maps accepted spellings to
    /// a conversion.
    fn quantity(&self, key: &str, units: &[(&str, fn(f64) -> f64)]) -> Result<f64, ConfigError> {
        let accepted = units.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(" | ");
        let Some(unit) = self.unit else {
            return Err(at(self.line, format!("{key} needs a unit ({accepted})")));
        };
        let Some((_, convert)) = units.iter().find(|(u, _)| *u == unit) else {
            return Err(at(self.line, format!("unknown unit '{unit}' for {key} (expected {accepted})")));
        };
        Ok(convert(self.number()?))
    }
}

fn split_line(line: usize, raw: &str) -> Result<Option<(&str, Entry<'_>)>, ConfigError> {
    let content = raw.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let Some((key, rest)) = content.split_once('=') else {
        return Err(at(line, format!("expected 'key = value', found '{content}'")));
    };
    let key = key.trim();
    let mut tokens = rest.split_whitespace();
    let Some(value) = tokens.next() else {
        return Err(at(line, format!("{key} has no value")));
    };
    let unit = tokens.next();
    if let Some(extra) = tokens.next() {
        return Err(at(line, format!("unexpected '{extra}' after the value of {key}")));
    }
    Ok(Some((key, Entry { line, value, unit })))
}

fn kelvin(v: f64) -> f64 {
    v
}
fn millikelvin(v: f64) -> f64 {
    v / 1e3
}
fn metre(v: f64) -> f64 {
    v
}
fn nanometre(v: f64) -> f64 {
    v / 1e9
}
fn kilogram(v: f64) -> f64 {
    v
}
fn electron_masses(v: f64) -> f64 {
    v * ELECTRON_MASS
}

const TEMPERATURE: &[(&str, fn(f64) -> f64)] = &[("K", kelvin), ("mK", millikelvin)];
const LENGTH: &[(&str, fn(f64) -> f64)] = &[("m", metre), ("nm", nanometre)];
const MASS: &[(&str, fn(f64) -> f64)] = &[("kg", kilogram), ("m_e", electron_masses)];

/// Parse a configuration document. The empty document is the reference
/// configuration.
pub fn parse_config(text: &str) -> Result<ResolvedConfig, ConfigError> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some((key, entry)) = split_line(line, raw)? else {
            continue;
        };
        if !KEYS.contains(&key) {
            return Err(at(line, format!("unknown key '{key}'")));
        }
        if let Some(first) = entries.get(key) {
            return Err(at(line, format!("duplicate key '{key}' (first set on line {})", first.line)));
        }
        entries.insert(key, entry);
    }

    let mut c = ResolvedConfig::default();
    for (&key, e) in &entries {
        match key {
            "T_h" => c.hot_temperature = e.quantity(key, TEMPERATURE)?,
            "T_c" => c.cold_temperature = e.quantity(key, TEMPERATURE)?,
            "a" => c.half_width = e.quantity(key, LENGTH)?,
            "m" => c.mass = e.quantity(key, MASS)?,
            "coherence" => {
                e.unitless(key)?;
                c.coherence = match e.value {
                    "exact-phase" => CoherenceMode::ExactPhase,
                    "drop-coherences" => CoherenceMode::DropCoherences,
                    other => {
                        return Err(at(
                            e.line,
                            format!("coherence must be exact-phase or drop-coherences, got '{other}'"),
                        ))
                    }
                };
            }
            "record_trajectory" => {
                e.unitless(key)?;
                c.record_trajectory = match e.value {
                    "true" => true,
                    "false" => false,
                    other => return Err(at(e.line, format!("record_trajectory must be true or false, got '{other}'"))),
                };
            }
            "n_max" => {
                e.unitless(key)?;
                c.n_max = e.integer()?;
            }
            "r" => {
                e.unitless(key)?;
                c.r = e.integer()?;
            }
            "max_quench_steps" => {
                e.unitless(key)?;
                c.max_quench_steps = e.integer()?;
            }
            _ => {
                e.unitless(key)?;
                let v = e.number()?;
                match key {
                    "sigma" => c.sigma = v,
                    "gap_tolerance" => c.gap_tolerance = v,
                    "gamma_divisor" => c.gamma_divisor = v,
                    "dtau_divisor" => c.dtau_divisor = v,
                    "degenerate_gap_threshold" => c.degenerate_gap_threshold = v,
                    _ => unreachable!("key list and match arms disagree on '{key}'"),
                }
            }
        }
    }
    check_values(&c, &entries)?;
    Ok(c)
}

/// Range checks, reported against the offending line where there is one.
fn check_values(c: &ResolvedConfig, entries: &BTreeMap<&str, Entry>) -> Result<(), ConfigError> {
    let line_of = |key: &str| entries.get(key).map(|e| e.line);
    let fail = |key: &str, message: String| match line_of(key) {
        Some(line) => at(line, message),
        None => ConfigError::Invalid(message),
    };
    for (key, t) in [("T_h", c.hot_temperature), ("T_c", c.cold_temperature)] {
        if t <= 0.0 {
            return Err(fail(key, format!("{key} must be positive, got {t} K")));
        }
    }
    if c.cold_temperature >= c.hot_temperature {
        let key = match (line_of("T_h"), line_of("T_c")) {
            (Some(h), Some(cold)) if h > cold => "T_h",
            (Some(_), None) => "T_h",
            _ => "T_c",
        };
        return Err(fail(
            key,
            format!(
                "T_c = {} K must be below T_h = {} K",
                c.cold_temperature, c.hot_temperature
            ),
        ));
    }
    let positive = [
        ("a", c.half_width),
        ("m", c.mass),
        ("sigma", c.sigma),
        ("gamma_divisor", c.gamma_divisor),
        ("dtau_divisor", c.dtau_divisor),
    ];
    for (key, v) in positive {
        if v <= 0.0 {
            return Err(fail(key, format!("{key} must be positive, got {v}")));
        }
    }
    if c.n_max < 2 || c.n_max % 2 != 0 {
        return Err(fail("n_max", format!("n_max must be even and at least 2, got {}", c.n_max)));
    }
    if c.r == 0 {
        return Err(fail("r", "r must be at least 1".into()));
    }
    if !(c.gap_tolerance > 0.0 && c.gap_tolerance < 1.0) {
        return Err(fail("gap_tolerance", format!("gap_tolerance must lie in (0, 1), got {}", c.gap_tolerance)));
    }
    if c.degenerate_gap_threshold < 0.0 {
        return Err(fail("degenerate_gap_threshold", "degenerate_gap_threshold must be non-negative".into()));
    }
    if c.max_quench_steps == 0 {
        return Err(fail("max_quench_steps", "max_quench_steps must be positive".into()));
    }
    Ok(())
}

/// Canonical text form; [`parse_config`] reads it back to an identical value.
/// Floats use the shortest representation that round-trips.
pub fn serialize_config(c: &ResolvedConfig) -> String {
    let mut s = String::new();
    let mut line = |args: std::fmt::Arguments| {
        s.write_fmt(args).expect("writing to a String cannot fail");
        s.push('\n');
    };
    line(format_args!("T_h = {:e} K", c.hot_temperature));
    line(format_args!("T_c = {:e} K", c.cold_temperature));
    line(format_args!("a = {:e} m", c.half_width));
    line(format_args!("m = {:e} kg", c.mass));
    line(format_args!("n_max = {}", c.n_max));
    line(format_args!("sigma = {:e}", c.sigma));
    line(format_args!("r = {}", c.r));
    line(format_args!("gap_tolerance = {:e}", c.gap_tolerance));
    line(format_args!("gamma_divisor = {:e}", c.gamma_divisor));
    line(format_args!("dtau_divisor = {:e}", c.dtau_divisor));
    line(format_args!("degenerate_gap_threshold = {:e}", c.degenerate_gap_threshold));
    line(format_args!("coherence = {}", c.coherence.as_str()));
    line(format_args!("max_quench_steps = {}", c.max_quench_steps));
    line(format_args!("record_trajectory = {}", c.record_trajectory));
    s
}
