//! Catalog of shipped network specs.
//!
//! Spec files live in `presets/` next to this crate's manifest and are
//! compiled in, so the catalog works from any working directory. Each entry
//! carries a short blurb and a file of expected statistics that the preset
//! tests check against fresh simulations.

use serde::Deserialize;
use thiserror::Error;

use crate::netspec::{parse_spec_as, validate, Format, NetworkSpec, Point};

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset \"{0}\"")]
    Unknown(String),
    #[error("preset {name} is broken: {message}")]
    Broken { name: String, message: String },
}

#[derive(Clone, Copy, Debug)]
pub struct PresetEntry {
    pub name: &'static str,
    pub blurb: &'static str,
    /// TOML spec text.
    pub spec: &'static str,
    /// JSON expected-statistics text.
    pub expected: &'static str,
}

macro_rules! entry {
    ($name:literal, $blurb:literal) => {
        PresetEntry {
            name: $name,
            blurb: $blurb,
            spec: include_str!(concat!("../presets/", $name, ".toml")),
            expected: include_str!(concat!("../presets/", $name, ".expected.json")),
        }
    };
}

pub const CATALOG: &[PresetEntry] = &[
    entry!("fig1-cycle3", "Three saddles on a square joined into an attracting heteroclinic cycle, every ratio 2."),
    entry!("fig1-cycle3-unstable", "The three-saddle cycle with every ratio 0.5; orbits leave it."),
    entry!("cycle2-relaxed", "Two-saddle cycle with ratios 0.5 and 3: one saddle expands, the product still attracts."),
    entry!(
        "fig2-twosaddle",
        "Two saddles with a kicked connection; biased sine kernel, lambda_u 1/2 at the destination."
    ),
    entry!("fig2-twosaddle-sine", "Biased sine kernel, destination lambda_u 1/2."),
    entry!("fig2-twosaddle-sawtooth", "Sawtooth kernel, destination lambda_u 1/2."),
    entry!("fig2-twosaddle-square", "Square-wave kernel, destination lambda_u 1/2."),
    entry!("fig2-twosaddle-sine-slow", "Biased sine kernel, destination lambda_u 1/4."),
    entry!("fig2-twosaddle-sawtooth-slow", "Sawtooth kernel, destination lambda_u 1/4."),
    entry!("fig2-twosaddle-square-slow", "Square-wave kernel, destination lambda_u 1/4."),
    entry!("nichols4", "Forward, reversal and quiescence saddles plus a named turn corridor from reversal to forward."),
    entry!(
        "nichols4-prelethargus10",
        "Four-state network tuned so about half of forward exits happen within 3 time units."
    ),
    entry!("nichols4-prelethargus21", "Four-state network with longer forward bouts than prelethargus10."),
    entry!("nichols4-lethargus10", "Four-state network with long quiescence-bound forward bouts."),
    entry!(
        "nichols4-memory-weak",
        "Four-state network whose weak turn contraction carries memory of the previous state into forward."
    ),
    entry!(
        "nichols4-memory-strong",
        "The memory network with strong turn contraction; forward forgets where it came from."
    ),
    entry!(
        "linderman8",
        "Eight behavioral states: four saddles and four corridor states, one of them on two corridors."
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|e| e.name)
}

pub fn entry(name: &str) -> Result<&'static PresetEntry, PresetError> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| PresetError::Unknown(name.to_string()))
}

/// Parse and validate a shipped preset.
pub fn load_preset(name: &str) -> Result<NetworkSpec, PresetError> {
    let e = entry(name)?;
    let broken = |message: String| PresetError::Broken { name: name.to_string(), message };
    let spec = parse_spec_as(e.spec, Format::Toml).map_err(|err| broken(err.to_string()))?;
    let violations = validate(&spec);
    if let Some(v) = violations.first() {
        return Err(broken(v.to_string()));
    }
    Ok(spec)
}

/// Statistics a preset is expected to reproduce from its own `init`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    /// Seeds for the ensemble; the spec's `init` when empty.
    #[serde(default)]
    pub seeds: Vec<Point>,
    pub steps_per_seed: u64,
    #[serde(default)]
    pub probabilities: Vec<ExpectedProbability>,
    #[serde(default)]
    pub mean_dwell: Vec<ExpectedDwell>,
    #[serde(default)]
    pub dwell_fractions: Vec<ExpectedFractions>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedProbability {
    pub from: String,
    pub to: String,
    pub value: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedDwell {
    pub state: String,
    pub value: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFractions {
    pub state: String,
    pub value: Vec<f64>,
    pub tol: f64,
}

pub fn expected(name: &str) -> Result<Expected, PresetError> {
    let e = entry(name)?;
    serde_json::from_str(e.expected)
        .map_err(|err| PresetError::Broken { name: name.to_string(), message: err.to_string() })
}
