//! Scenario files: versioned JSON, unknown keys rejected.

use std::path::{Path, PathBuf};

use gravmetro::estimator::{Measurement, TrialConfig, MIN_REPLICAS};
use gravmetro::metrology::{SchemeKind, SchemeSpec};
use gravmetro::spacetime::constants;
use gravmetro::{GaussianWavepacket, ObserverPair, PacketPreset, SchwarzschildGeometry, SqueezingConvention};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Context};

pub const SCHEMA_VERSION: u32 = 1;
pub const SCENARIO_DIR_ENV: &str = "GRAVMETRO_SCENARIO_DIR";
pub const DEFAULT_SCENARIO_FILE: &str = "default.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub geometry: GeometrySpec,
    pub r_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_b: Option<f64>,
    /// Separation `r_B - r_A`; give this or `r_b`, not both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    pub packet: PacketSpec,
    pub scheme: ProbeSpec,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
}

/// Exactly one of `r_s` (metres) or `mass` (kilograms).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

/// Either `preset` or both `omega0` and `sigma`, in cyclic Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PacketPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// Probe state. The first carrier is the packet peak; `omega2` defaults to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub kind: SchemeKind,
    #[serde(default)]
    pub alpha: Complex64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub psi: f64,
    #[serde(default = "one")]
    pub mu_a: f64,
    #[serde(default = "one")]
    pub mu_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2: Option<f64>,
    #[serde(default)]
    pub convention: SqueezingConvention,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default = "default_theta")]
    pub true_theta: f64,
    #[serde(default = "default_shots")]
    pub n_shots: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub measurement: Measurement,
}

fn default_theta() -> f64 {
    0.99
}

fn default_shots() -> usize {
    1000
}

fn default_replicas() -> usize {
    1000
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            true_theta: default_theta(),
            n_shots: default_shots(),
            replicas: default_replicas(),
            measurement: Measurement::Heterodyne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// A scenario after validation, in library types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: SchwarzschildGeometry,
    pub pair: ObserverPair,
    pub packet: GaussianWavepacket,
    pub scheme: SchemeSpec,
    pub n: f64,
    pub seed: u64,
    pub estimator: EstimatorSpec,
}

impl Resolved {
    pub fn trial(&self) -> TrialConfig {
        TrialConfig {
            scheme: self.scheme,
            true_theta: self.estimator.true_theta,
            n_shots: self.estimator.n_shots,
            seed: self.seed,
            measurement: self.estimator.measurement,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::field(field, format!("must be positive and finite, got {v}")))
    }
}

impl Scenario {
    /// Link and probe of the Earth-to-geostationary reproduction scenario.
    ///
    /// Uses `r_B = 4.237e7 m`; the quoted `L = 3.6e6 m` is inconsistent with it.
    pub fn reproduction(preset: PacketPreset, kind: SchemeKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            geometry: GeometrySpec {
                r_s: None,
                mass: Some(constants::EARTH_MASS),
            },
            r_a: constants::EARTH_RADIUS,
            r_b: Some(4.237e7),
            l: None,
            packet: PacketSpec {
                preset: Some(preset),
                ..Default::default()
            },
            scheme: ProbeSpec {
                kind,
                alpha: Complex64::new(if kind == SchemeKind::Coherent { 1.5f64.sinh() } else { 0.0 }, 0.0),
                r: if kind == SchemeKind::Coherent { 0.0 } else { 1.5 },
                psi: 0.0,
                mu_a: 1.0,
                mu_b: 1.0,
                omega2: None,
                convention: SqueezingConvention::Single,
            },
            n: 1e10,
            seed: 0,
            format: None,
            estimator: EstimatorSpec::default(),
        }
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|source| CliError::Json {
            path: path.to_string(),
            source,
        })?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
        Self::from_json(&text, &shown)
    }

    /// Checks every field and converts to library types.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::field(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let geometry = match (self.geometry.r_s, self.geometry.mass) {
            (Some(r_s), None) => SchwarzschildGeometry::new(r_s).context("geometry.r_s")?,
            (None, Some(m)) => SchwarzschildGeometry::from_mass(m).context("geometry.mass")?,
            _ => return Err(CliError::field("geometry", "give exactly one of `r_s` or `mass`")),
        };
        let r_a = positive("r_a", self.r_a)?;
        let r_b = match (self.r_b, self.l) {
            (Some(r_b), None) => positive("r_b", r_b)?,
            (None, Some(l)) => {
                if !l.is_finite() {
                    return Err(CliError::field("l", "must be finite"));
                }
                r_a + l
            }
            _ => return Err(CliError::field("r_b", "give exactly one of `r_b` or `l`")),
        };
        let pair = ObserverPair::new(r_a, r_b).context("r_b")?;
        for (field, r) in [("r_a", pair.r_a), ("r_b", pair.r_b)] {
            geometry.metric_function(r).context(field)?;
        }
        let packet = match (self.packet.preset, self.packet.omega0, self.packet.sigma) {
            (Some(p), None, None) => p.packet(),
            (None, Some(w), Some(s)) => {
                GaussianWavepacket::new(positive("packet.omega0", w)?, positive("packet.sigma", s)?)
                    .context("packet")?
            }
            _ => {
                return Err(CliError::field(
                    "packet",
                    "give either `preset` or both `omega0` and `sigma`",
                ))
            }
        };
        let p = &self.scheme;
        let scheme = SchemeSpec {
            kind: p.kind,
            alpha: p.alpha,
            r: p.r,
            psi: p.psi,
            mu_a: p.mu_a,
            mu_b: p.mu_b,
            omega1: packet.omega0,
            omega2: p.omega2.unwrap_or(packet.omega0),
            convention: p.convention,
        };
        scheme.validate().map_err(|e| match e {
            gravmetro::Error::InvalidParameter { name, .. } => CliError::field(format!("scheme.{name}"), e.to_string()),
            other => CliError::Core {
                context: "scheme".into(),
                source: other,
            },
        })?;
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(CliError::field("N", format!("need at least one measurement, got {}", self.n)));
        }
        let e = &self.estimator;
        if !(e.true_theta > 0.0 && e.true_theta <= 1.0) {
            return Err(CliError::field("estimator.true_theta", format!("must lie in (0, 1], got {}", e.true_theta)));
        }
        if e.n_shots == 0 {
            return Err(CliError::field("estimator.n_shots", "at least one shot is needed"));
        }
        check_replicas(e.replicas).map_err(|m| CliError::field("estimator.replicas", m))?;
        Ok(Resolved {
            geometry,
            pair,
            packet,
            scheme,
            n: self.n,
            seed: self.seed,
            estimator: *e,
        })
    }
}

pub fn check_replicas(replicas: usize) -> Result<(), String> {
    if replicas < MIN_REPLICAS {
        Err(format!("at least {MIN_REPLICAS} replicas are required, got {replicas}"))
    } else {
        Ok(())
    }
}

/// Scenario path: explicit, else `default.json` in the scenario directory.
///
/// A relative explicit path that does not exist is also looked up in that directory.
pub fn locate(explicit: Option<&Path>, dir: Option<&Path>) -> Option<PathBuf> {
    match (explicit, dir) {
        (Some(p), Some(d)) if p.is_relative() && !p.exists() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => {
            let p = d.join(DEFAULT_SCENARIO_FILE);
            p.exists().then_some(p)
        }
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduction_scenario_round_trips() {
        let s = Scenario::reproduction(PacketPreset::StateOfTheArt400THz, SchemeKind::SingleModeSqueezed);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(Scenario::from_json(&text, "x").unwrap(), s);
        let r = s.resolve().unwrap();
        assert_eq!(r.scheme.omega1, 4e14);
        assert_eq!(r.pair.separation(), 4.237e7 - 6.371e6);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut v = serde_json::to_value(Scenario::reproduction(PacketPreset::Comm700THz, SchemeKind::Coherent)).unwrap();
        v["geometry"]["G"] = 6.7e-11.into();
        assert!(Scenario::from_json(&v.to_string(), "x").is_err());
    }

    #[test]
    fn conflicting_fields_point_at_the_field() {
        let mut s = Scenario::reproduction(PacketPreset::Comm700THz, SchemeKind::Coherent);
        s.l = Some(1e6);
        match s.resolve() {
            Err(CliError::Scenario { field, .. }) => assert_eq!(field, "r_b"),
            other => panic!("{other:?}"),
        }
        let mut s = Scenario::reproduction(PacketPreset::Comm700THz, SchemeKind::SingleModeSqueezed);
        s.scheme.mu_a = 0.5;
        match s.resolve() {
            Err(CliError::Scenario { field, .. }) => assert_eq!(field, "scheme.mu_a"),
            other => panic!("{other:?}"),
        }
    }
}
