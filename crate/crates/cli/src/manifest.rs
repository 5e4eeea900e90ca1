//! Clip manifests: JSON lines, one clip record per line. Relative paths
//! resolve against the manifest file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipRecord {
    pub id: String,
    pub pose_sequence: PathBuf,
    pub object_mesh: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_frames: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_frames: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_tracklets: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_tracklets: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_joints: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_joints: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_vertices: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_vertices: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_features: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_features: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose_error_mm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ClipManifest {
    pub records: Vec<ClipRecord>,
    base_dir: PathBuf,
}

impl ClipManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        let mut records = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: ClipRecord = serde_json::from_str(line).map_err(|e| {
                CliError::Schema(format!("{} line {}: {e}", path.display(), lineno + 1))
            })?;
            records.push(record);
        }
        let mut ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Schema(format!(
                "{}: duplicate clip id '{}'",
                path.display(),
                dup[0]
            )));
        }
        Ok(Self { records, base_dir: path.parent().unwrap_or(Path::new(".")).to_path_buf() })
    }

    pub fn save(path: &Path, records: &[ClipRecord]) -> CliResult<()> {
        let mut out = String::new();
        for record in records {
            out.push_str(&serde_json::to_string(record)?);
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
