//! Scenario files and their validation into runnable jobs.
//!
//! A scenario is TOML (or JSON, picked by the `.json` extension) with a
//! `command` key and one section per ingredient:
//!
//! ```toml
//! command = "attack"
//!
//! [state]
//! family = "gamma-swap"
//! ds = 4
//!
//! [channel]
//! kind = "depolarizing"
//!
//! [sweep]
//! variable = "alpha"
//! start = 0.0
//! stop = 1.0
//! points = 101
//! ```
//!
//! Command-line flags are translated into the same structure, so both paths
//! share validation and the scenario hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_P_POINTS: usize = 201;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
    /// Where results go. Not part of the scenario hash.
    #[serde(default, skip_serializing)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub da: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: String,
    /// Fixed strength; a sweep over `alpha` replaces it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Points of the mixing grid in the relative-entropy bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub kind: String,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deriv_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub kind: String,
    pub d_a: usize,
    pub x: RangeSpec,
    pub y: RangeSpec,
}

/// Mirrors the leakage-bound inputs; omitted fields take their neutral
/// value (0 entropies, unit dimensions).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_x: Option<f64>,
    /// Either `delta` or `cmi` (from which δ = √(1 − 2^{−I})).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cmi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_alice: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_sigma_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_sigma_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cmi_a_c_given_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub er_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_x: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Scenario {
    /// SHA-256 of the canonical JSON form, output section excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Fill in defaults that change results, so that an explicit and an
    /// implicit default hash identically.
    pub fn with_defaults(mut self) -> Self {
        if let Some(ch) = &mut self.channel {
            if self.command == "attack" {
                ch.p_points.get_or_insert(DEFAULT_P_POINTS);
            }
        }
        if self.command == "markov" && self.witness.is_none() {
            self.witness = Some(WitnessSpec {
                kind: "coherence".into(),
                ..Default::default()
            });
        }
        if let Some(w) = &mut self.witness {
            w.deriv_tol.get_or_insert(privwit::nonmarkov::DEFAULT_DERIV_TOL);
            if w.kind == "random" {
                w.norm.get_or_insert(0.5);
            }
        }
        if self.command == "attack" && self.state.is_none() {
            self.state = Some(StateSpec {
                family: "gamma-swap".into(),
                ds: Some(2),
                ..Default::default()
            });
        }
        self
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read scenario {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let sc: Scenario = if is_json {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
    };
    Ok(sc.with_defaults())
}

/// `start:stop:points`, optionally prefixed by `variable:`.
pub fn parse_range(s: &str, field: &str) -> Result<(Option<String>, RangeSpec), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let (var, nums) = match parts.len() {
        3 => (None, &parts[..]),
        4 => (Some(parts[0].to_string()), &parts[1..]),
        _ => return Err(CliError::field(field, format!("expected [variable:]start:stop:points, got `{s}`"))),
    };
    let num = |k: usize| {
        nums[k]
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::field(field, format!("`{}` is not a number", nums[k])))
    };
    let points = nums[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::field(field, format!("`{}` is not a point count", nums[2])))?;
    Ok((
        var,
        RangeSpec {
            start: num(0)?,
            stop: num(1)?,
            points,
        },
    ))
}

/// `name:key=value,key=value`.
pub fn parse_kv(s: &str, field: &str) -> Result<(String, BTreeMap<String, String>), CliError> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut map = BTreeMap::new();
    for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::field(field, format!("expected key=value, got `{pair}`")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name.trim().to_string(), map))
}

pub fn take_num<T: std::str::FromStr>(
    map: &mut BTreeMap<String, String>,
    key: &str,
    field: &str,
) -> Result<Option<T>, CliError> {
    map.remove(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::field(&format!("{field}.{key}"), format!("`{v}` is not a valid value")))
        })
        .transpose()
}

pub fn reject_leftovers(map: &BTreeMap<String, String>, field: &str) -> Result<(), CliError> {
    match map.keys().next() {
        Some(k) => Err(CliError::field(field, format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

pub fn grid(r: &RangeSpec, field: &str) -> Result<Vec<f64>, CliError> {
    if !r.start.is_finite() || !r.stop.is_finite() {
        return Err(CliError::field(field, "range ends must be finite"));
    }
    match r.points {
        0 => Err(CliError::field(&format!("{field}.points"), "grid must be non-empty")),
        1 => Ok(vec![r.start]),
        n => Ok((0..n)
            .map(|k| r.start + (r.stop - r.start) * k as f64 / (n - 1) as f64)
            .collect()),
    }
}
