//! Pipeline configuration: an INI-style key/value file (sections become key
//! prefixes) or the equivalent nested JSON. Unknown keys are rejected, all
//! seeds are mandatory, and relative asset paths resolve against the config
//! file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use serde::Deserialize;

use hoi_forge_core::raster::Camera;
use hoi_forge_core::trajectory::{Easing, TrajectoryConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSection {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    /// World-to-camera axis-angle rotation.
    #[serde(default)]
    pub rot: [f64; 3],
    /// World-to-camera translation, meters.
    #[serde(default)]
    pub trans: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    pub frame_count: usize,
    pub fps: f64,
    pub contact_fraction: f64,
    pub max_penetration_mm: f64,
    pub easing: String,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        Self {
            frame_count: 49,
            fps: 12.0,
            contact_fraction: 0.5,
            max_penetration_mm: 5.0,
            easing: "smoothstep".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditioningSection {
    #[serde(default = "default_mask_probability")]
    pub mask_probability: f64,
    pub encoder_seed: u64,
    pub mask_seed: u64,
}

fn default_mask_probability() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackletSection {
    #[serde(default = "default_tracklet_count")]
    pub count: usize,
    pub seed: u64,
}

fn default_tracklet_count() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    pub fscore_thresholds_mm: Vec<f64>,
    pub correlation_eps: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self { fscore_thresholds_mm: vec![5.0, 15.0], correlation_eps: 1e-6 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetsSection {
    pub object_mesh: Option<PathBuf>,
    pub endpoints: Option<PathBuf>,
    /// Hand asset JSON; the built-in template is used when absent.
    pub hand: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub camera: CameraSection,
    #[serde(default)]
    pub trajectory: TrajectorySection,
    pub conditioning: ConditioningSection,
    pub tracklets: TrackletSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub assets: AssetsSection,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl PipelineConfig {
    /// Loads `.json` as nested JSON, anything else as INI-style key/value.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        let mut config: PipelineConfig =
            if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
            } else {
                from_ini(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
            };
        config.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        let schema = |m: String| Err(CliError::Schema(m));
        if self.camera.width % 8 != 0 || self.camera.height % 8 != 0 {
            return schema(format!(
                "camera resolution {}x{} must be divisible by 8 for latent packing",
                self.camera.width, self.camera.height
            ));
        }
        if self.trajectory.frame_count < 2 {
            return schema(format!("trajectory.frame_count {} < 2", self.trajectory.frame_count));
        }
        if (self.trajectory.frame_count - 1) % 4 != 0 {
            return schema(format!(
                "trajectory.frame_count {} must be 1 mod 4 for latent packing",
                self.trajectory.frame_count
            ));
        }
        if !(0.0..=1.0).contains(&self.trajectory.contact_fraction) {
            return schema(format!(
                "trajectory.contact_fraction {} outside [0, 1]",
                self.trajectory.contact_fraction
            ));
        }
        if self.trajectory.max_penetration_mm < 0.0 {
            return schema("trajectory.max_penetration_mm must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.conditioning.mask_probability) {
            return schema(format!(
                "conditioning.mask_probability {} outside [0, 1]",
                self.conditioning.mask_probability
            ));
        }
        if self.metrics.fscore_thresholds_mm.iter().any(|&t| t <= 0.0) {
            return schema("metrics.fscore_thresholds_mm must be positive".into());
        }
        self.easing()?;
        self.camera()?;
        Ok(())
    }

    pub fn easing(&self) -> CliResult<Easing> {
        match self.trajectory.easing.as_str() {
            "linear" => Ok(Easing::Linear),
            "smoothstep" => Ok(Easing::Smoothstep),
            other => Err(CliError::Schema(format!("unknown easing '{other}'"))),
        }
    }

    pub fn camera(&self) -> CliResult<Camera> {
        let c = &self.camera;
        let extrinsics = Isometry3::from_parts(
            Translation3::from(Vector3::from(c.trans)),
            UnitQuaternion::from_scaled_axis(Vector3::from(c.rot)),
        );
        Camera::new(c.fx, c.fy, c.cx, c.cy, c.width, c.height, extrinsics)
            .map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn trajectory_config(&self) -> CliResult<TrajectoryConfig> {
        Ok(TrajectoryConfig {
            frame_count: self.trajectory.frame_count,
            contact_fraction: self.trajectory.contact_fraction,
            max_penetration_mm: self.trajectory.max_penetration_mm,
            easing: self.easing()?,
            frame_rate: self.trajectory.fps,
        })
    }

    /// Resolves a possibly-relative path against the config directory.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Replaces every configured seed (encoder, mask, tracklets).
    pub fn override_seeds(&mut self, seed: u64) {
        self.conditioning.encoder_seed = seed;
        self.conditioning.mask_seed = seed;
        self.tracklets.seed = seed;
    }
}

/// INI-style parser: `[section]` headers then `key = value` lines; `#` or `;`
/// start comments. Values may be scalars, strings or comma-separated arrays.
/// The result funnels through the same serde structs as the JSON form, so
/// unknown sections or keys are rejected identically.
fn from_ini(text: &str) -> Result<PipelineConfig, String> {
    let mut sections: BTreeMap<String, serde_json::Map<String, serde_json::Value>> =
        BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(&['#', ';'][..]).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected 'key = value', got '{line}'", lineno + 1));
        };
        let section = current
            .clone()
            .ok_or_else(|| format!("line {}: key outside any [section]", lineno + 1))?;
        sections
            .get_mut(&section)
            .expect("section inserted on header")
            .insert(key.trim().to_string(), parse_ini_value(value.trim()));
    }
    let root: serde_json::Map<String, serde_json::Value> = sections
        .into_iter()
        .map(|(name, map)| (name, serde_json::Value::Object(map)))
        .collect();
    serde_json::from_value(serde_json::Value::Object(root)).map_err(|e| e.to_string())
}

fn parse_ini_value(value: &str) -> serde_json::Value {
    if value.contains(',') {
        return serde_json::Value::Array(
            value.split(',').map(|v| parse_ini_value(v.trim())).collect(),
        );
    }
    if let Ok(i) = value.parse::<i64>() {
        return serde_json::Value::from(i);
    }
    if let Ok(u) = value.parse::<u64>() {
        return serde_json::Value::from(u);
    }
    if let Ok(f) = value.parse::<f64>() {
        if let Some(n) = serde_json::Number::from_f64(f) {
            return serde_json::Value::Number(n);
        }
    }
    match value {
        "true" => serde_json::Value::Bool(true),
        "false" => serde_json::Value::Bool(false),
        other => serde_json::Value::String(other.trim_matches('"').to_string()),
    }
}
