//! Flat `key = value` configuration files.
//!
//! ```text
//! # fig2a base point
//! omega_c = 0.5
//! omega_a = 1
//! omega_d = 1pi
//! g = 0.8
//! ```
//!
//! Keys not present keep their [`SystemSpec::default`] value. Real values may
//! carry a `pi` suffix (`0.75pi`, `pi`).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::SystemSpec;

/// Every recognised key, in emission order.
pub const KEYS: [&str; 15] = [
    "omega_c",
    "omega_a",
    "omega_d",
    "g",
    "J",
    "kappa",
    "N",
    "n",
    "A",
    "T",
    "channels",
    "initial_battery",
    "t_max",
    "dt",
    "record_every",
];

/// Parses a real number, accepting an optional `pi` factor.
pub fn parse_real(raw: &str) -> std::result::Result<f64, String> {
    let s = raw.trim();
    let value = match s.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))?
            };
            c * std::f64::consts::PI
        }
        None => s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

fn parse_count(raw: &str) -> std::result::Result<usize, String> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    // Accept "3.0" but not "2.5".
    let v = parse_real(s)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

/// Sets one key on `spec`. Errors are plain messages so callers can attach
/// a line number or flag name.
pub fn set_key(spec: &mut SystemSpec, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "omega_c" => spec.omega_c = parse_real(value)?,
        "omega_a" => spec.omega_a = parse_real(value)?,
        "omega_d" => spec.omega_d = parse_real(value)?,
        "g" => spec.coupling = parse_real(value)?,
        "J" => spec.hopping = parse_real(value)?,
        "kappa" => spec.kappa = parse_real(value)?,
        "A" => spec.amplitude = parse_real(value)?,
        "T" => spec.temperature = parse_real(value)?,
        "t_max" => spec.t_max = parse_real(value)?,
        "dt" => spec.dt = parse_real(value)?,
        "N" => spec.spins = parse_count(value)?,
        "n" => spec.photon_cutoff = parse_count(value)?,
        "record_every" => spec.record_every = parse_count(value)?,
        "channels" => spec.channels = value.parse().map_err(|e: Error| e.to_string())?,
        "initial_battery" => spec.initial_battery = value.parse().map_err(|e: Error| e.to_string())?,
        other => return Err(format!("unknown key '{other}' (expected one of {})", KEYS.join(", "))),
    }
    Ok(())
}

/// Parses config text on top of `base` without validating the result.
pub fn parse_onto(base: SystemSpec, text: &str) -> Result<SystemSpec> {
    let mut spec = base;
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected 'key = value', got '{content}'") })?;
        let key = key.trim();
        if !seen.insert(key.to_string()) {
            return Err(Error::Parse { line, msg: format!("duplicate key '{key}'") });
        }
        set_key(&mut spec, key, value).map_err(|msg| Error::Parse { line, msg })?;
    }
    Ok(spec)
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<SystemSpec> {
    let spec = parse_onto(SystemSpec::default(), text)?;
    spec.validate()?;
    Ok(spec)
}

pub fn read_config(path: &Path) -> Result<SystemSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Value of `key` as it is written back out. Reals use the shortest
/// representation that parses back to the same `f64`.
pub fn key_value(spec: &SystemSpec, key: &str) -> Option<String> {
    Some(match key {
        "omega_c" => spec.omega_c.to_string(),
        "omega_a" => spec.omega_a.to_string(),
        "omega_d" => spec.omega_d.to_string(),
        "g" => spec.coupling.to_string(),
        "J" => spec.hopping.to_string(),
        "kappa" => spec.kappa.to_string(),
        "A" => spec.amplitude.to_string(),
        "T" => spec.temperature.to_string(),
        "t_max" => spec.t_max.to_string(),
        "dt" => spec.dt.to_string(),
        "N" => spec.spins.to_string(),
        "n" => spec.photon_cutoff.to_string(),
        "record_every" => spec.record_every.to_string(),
        "channels" => spec.channels.to_string(),
        "initial_battery" => spec.initial_battery.to_string(),
        _ => return None,
    })
}

/// Every key of `spec`, one per line.
pub fn emit_config(spec: &SystemSpec) -> String {
    let mut out = String::new();
    for key in KEYS {
        let value = key_value(spec, key).expect("KEYS are all known");
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}
