//! Metric input/output files.
//!
//! - Joint/vertex files: JSON `{schema, units: "mm", frames: [[[x,y,z], ...], ...]}`.
//! - Feature matrices: raw little-endian float32 blob with a `<file>.json`
//!   sidecar `{n, d}`.
//! - Reports: the [`MetricsReport`] JSON with a schema version.

use std::path::{Path, PathBuf};

use nalgebra::Point3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MetricError, MetricsReport};

#[derive(Debug, Error)]
pub enum MetricFileError {
    #[error("bad metric file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsFile {
    schema: u32,
    units: String,
    frames: Vec<Vec<[f64; 3]>>,
}

/// Loads per-frame point sets (joints or vertices) in millimeters.
pub fn load_point_frames(path: &Path) -> Result<Vec<Vec<Point3<f64>>>, MetricFileError> {
    let file: PointsFile = serde_json::from_slice(&std::fs::read(path)?)?;
    if file.schema != 1 {
        return Err(MetricFileError::BadFile(format!(
            "{}: unsupported schema {}",
            path.display(),
            file.schema
        )));
    }
    if file.units != "mm" {
        return Err(MetricFileError::BadFile(format!(
            "{}: units must be mm, got {}",
            path.display(),
            file.units
        )));
    }
    Ok(file
        .frames
        .into_iter()
        .map(|f| f.into_iter().map(|[x, y, z]| Point3::new(x, y, z)).collect())
        .collect())
}

pub fn save_point_frames(path: &Path, frames: &[Vec<Point3<f64>>]) -> Result<(), MetricFileError> {
    let file = PointsFile {
        schema: 1,
        units: "mm".into(),
        frames: frames
            .iter()
            .map(|f| f.iter().map(|p| [p.x, p.y, p.z]).collect())
            .collect(),
    };
    std::fs::write(path, serde_json::to_vec(&file)?)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureSidecar {
    n: usize,
    d: usize,
}

/// Loads an N x D feature matrix from a float32 blob plus `{n, d}` sidecar.
pub fn load_features(path: &Path) -> Result<Vec<Vec<f64>>, MetricFileError> {
    let sidecar: FeatureSidecar = serde_json::from_slice(&std::fs::read(sidecar_path(path))?)?;
    let bytes = std::fs::read(path)?;
    if bytes.len() != sidecar.n * sidecar.d * 4 {
        return Err(MetricFileError::BadFile(format!(
            "{}: blob holds {} bytes, sidecar wants {}x{} float32",
            path.display(),
            bytes.len(),
            sidecar.n,
            sidecar.d
        )));
    }
    let mut rows = Vec::with_capacity(sidecar.n);
    for r in 0..sidecar.n {
        let mut row = Vec::with_capacity(sidecar.d);
        for c in 0..sidecar.d {
            let o = (r * sidecar.d + c) * 4;
            row.push(f32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as f64);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn save_features(path: &Path, rows: &[Vec<f64>]) -> Result<(), MetricFileError> {
    let d = rows.first().map_or(0, Vec::len);
    let mut bytes = Vec::with_capacity(rows.len() * d * 4);
    for row in rows {
        if row.len() != d {
            return Err(MetricFileError::BadFile("ragged feature rows".into()));
        }
        for &v in row {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    std::fs::write(path, bytes)?;
    std::fs::write(
        sidecar_path(path),
        serde_json::to_vec(&FeatureSidecar { n: rows.len(), d })?,
    )?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    schema: u32,
    #[serde(flatten)]
    report: MetricsReport,
}

pub fn save_report(path: &Path, report: &MetricsReport) -> Result<(), MetricFileError> {
    report.validate()?;
    let file = ReportFile { schema: 1, report: report.clone() };
    std::fs::write(path, serde_json::to_vec_pretty(&file)?)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<MetricsReport, MetricFileError> {
    let file: ReportFile = serde_json::from_slice(&std::fs::read(path)?)?;
    if file.schema != 1 {
        return Err(MetricFileError::BadFile(format!(
            "{}: unsupported report schema {}",
            path.display(),
            file.schema
        )));
    }
    Ok(file.report)
}
