//! JSON device configuration.
//!
//! Keys starting with `_` are annotations and are dropped before decoding;
//! every other unknown key is an error naming its path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::benchmarking::{NoiseChannel, RbSpam, DEFAULT_LENGTHS};
use crate::circuit::CircuitParams;
use crate::dissipation::NoiseEnvironment;
use crate::error::{Error, Result};
use crate::protocols::Spam;

pub const SCHEMA: &str = "fluxonium-device/1";
/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "FLUXONIUM_CONFIG";
/// Device constants shipped with the crate.
pub const BUNDLED_DEVICE: &str = include_str!("../data/device.paper.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutDefaults {
    pub p0_measured: f64,
    pub p0_infinity: f64,
    pub t1_ro_us: f64,
    pub t_ro_us: f64,
    pub blob_angle_rad: f64,
    pub shots: usize,
}

impl Default for ReadoutDefaults {
    fn default() -> Self {
        Self {
            p0_measured: 0.558,
            p0_infinity: 0.166,
            t1_ro_us: 204.0,
            t_ro_us: 20.0,
            blob_angle_rad: 0.2547,
            shots: 15_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpingDefaults {
    /// 1/µs
    pub omega_12: f64,
    pub precision: f64,
    pub tan_delta_23: Option<f64>,
    pub drive_points: usize,
}

impl Default for PumpingDefaults {
    fn default() -> Self {
        Self {
            omega_12: 5.0,
            precision: 0.005,
            tan_delta_23: Some(1e-6),
            drive_points: 41,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbDefaults {
    pub lengths: Vec<usize>,
    pub n_random: usize,
    pub spam: RbSpam,
    pub noise: NoiseChannel,
}

impl Default for RbDefaults {
    fn default() -> Self {
        Self {
            lengths: DEFAULT_LENGTHS.to_vec(),
            n_random: 50,
            spam: RbSpam::default(),
            noise: NoiseChannel {
                depolarizing: 1e-4,
                ..Default::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolDefaults {
    pub t1_01_ms: f64,
    pub t1_02_ms: f64,
    pub t2_star_ms: f64,
    pub ramsey_detuning_khz: f64,
    pub spam: Spam,
    pub readout: ReadoutDefaults,
    pub pumping: PumpingDefaults,
    pub rb: RbDefaults,
}

impl Default for ProtocolDefaults {
    fn default() -> Self {
        Self {
            t1_01_ms: 1.0,
            t1_02_ms: 1.5,
            t2_star_ms: 1.48,
            ramsey_detuning_khz: 1.0,
            spam: Spam::default(),
            readout: ReadoutDefaults::default(),
            pumping: PumpingDefaults::default(),
            rb: RbDefaults::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub schema: String,
    pub circuit: CircuitParams,
    pub noise: NoiseEnvironment,
    #[serde(default)]
    pub protocols: ProtocolDefaults,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA.into(),
            circuit: CircuitParams::default(),
            noise: NoiseEnvironment::default(),
            protocols: ProtocolDefaults::default(),
            seed: 0,
        }
    }
}

fn strip_annotations(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.starts_with('_'));
            map.values_mut().for_each(strip_annotations);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_annotations),
        _ => {}
    }
}

impl DeviceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        strip_annotations(&mut value);
        let cfg: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Config(format!(
                "at `schema`: unsupported schema `{}`, expected `{SCHEMA}`",
                self.schema
            )));
        }
        let located = |section: &str, r: Result<()>| r.map_err(|e| Error::Config(format!("at `{section}`: {e}")));
        located("circuit", self.circuit.validate())?;
        located("noise", self.noise.validate())?;
        located("protocols.rb.noise", self.protocols.rb.noise.validate())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The constants shipped in `device.paper.json`.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_DEVICE).expect("bundled config is valid")
    }

    /// Explicit path, else the path in `FLUXONIUM_CONFIG`, else the bundled
    /// device.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(p) => Self::load(&p),
            None => Ok(Self::bundled()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_matches_defaults() {
        let cfg = DeviceConfig::bundled();
        assert_eq!(cfg.circuit, CircuitParams::default());
        assert_eq!(cfg.noise, NoiseEnvironment::default());
        assert_eq!(cfg.protocols, ProtocolDefaults::default());
    }

    #[test]
    fn unknown_key_is_located() {
        let text = BUNDLED_DEVICE.replace("\"x_qp\"", "\"x_qpp\"");
        let err = DeviceConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("noise"), "{err}");
        assert!(err.contains("x_qpp"), "{err}");
    }

    #[test]
    fn nested_unknown_key() {
        let text = BUNDLED_DEVICE.replace("\"t1_ro_us\"", "\"t1_ro\"");
        let err = DeviceConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("protocols.readout"), "{err}");
    }

    #[test]
    fn schema_is_checked() {
        let text = BUNDLED_DEVICE.replace(SCHEMA, "fluxonium-device/0");
        assert!(DeviceConfig::from_json(&text).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = DeviceConfig::bundled();
        assert_eq!(DeviceConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn invalid_physics_rejected() {
        let text = BUNDLED_DEVICE.replace("\"e_c\": 1.08", "\"e_c\": -1.0");
        assert!(matches!(DeviceConfig::from_json(&text), Err(Error::Config(_))));
    }
}
