//! Latent tensor files: raw little-endian float32 blob plus a JSON sidecar
//! (`<file>.json`) holding `{shape, order: "FHWC", cue, dropped}`. Projection
//! matrices persist the same way, keyed by cue kind and seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{projection_matrix, CueKind, CueTag, LatentTensor, ShapeError, LATENT_CHANNELS};

#[derive(Debug, Error)]
pub enum ConditioningError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("bad latent file: {0}")]
    BadFile(String),
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
struct LatentSidecar {
    shape: [usize; 4],
    order: String,
    cue: String,
    dropped: bool,
}

fn cue_tag_str(tag: CueTag) -> &'static str {
    match tag {
        CueTag::Cue(k) => k.as_str(),
        CueTag::Concat => "concat",
    }
}

fn parse_cue_tag(s: &str) -> Option<CueTag> {
    match s {
        "depth" => Some(CueTag::Cue(CueKind::Depth)),
        "seg" => Some(CueTag::Cue(CueKind::Seg)),
        "keypoint" => Some(CueTag::Cue(CueKind::Keypoint)),
        "concat" => Some(CueTag::Concat),
        _ => None,
    }
}

pub fn save_latent(path: &Path, latent: &LatentTensor, dropped: bool) -> Result<(), ConditioningError> {
    let mut bytes = Vec::with_capacity(latent.data().len() * 4);
    for v in latent.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    let sidecar = LatentSidecar {
        shape: latent.shape(),
        order: "FHWC".into(),
        cue: cue_tag_str(latent.cue()).into(),
        dropped,
    };
    std::fs::write(sidecar_path(path), serde_json::to_vec_pretty(&sidecar)?)?;
    Ok(())
}

pub fn load_latent(path: &Path) -> Result<(LatentTensor, bool), ConditioningError> {
    let sidecar: LatentSidecar = serde_json::from_slice(&std::fs::read(sidecar_path(path))?)?;
    if sidecar.order != "FHWC" {
        return Err(ConditioningError::BadFile(format!("unsupported order {}", sidecar.order)));
    }
    let cue = parse_cue_tag(&sidecar.cue)
        .ok_or_else(|| ConditioningError::BadFile(format!("unknown cue tag {}", sidecar.cue)))?;
    let bytes = std::fs::read(path)?;
    let expected = sidecar.shape.iter().product::<usize>() * 4;
    if bytes.len() != expected {
        return Err(ConditioningError::BadFile(format!(
            "{}: blob is {} bytes, sidecar shape needs {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok((LatentTensor::new(sidecar.shape, data, cue)?, sidecar.dropped))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionSidecar {
    cue: String,
    seed: u64,
    rows: usize,
    cols: usize,
}

/// Persists the raw-to-latent projection for reproducibility audits.
pub fn save_projection(path: &Path, kind: CueKind, seed: u64) -> Result<(), ConditioningError> {
    let matrix = projection_matrix(kind, seed);
    let mut bytes = Vec::with_capacity(matrix.len() * 4);
    for v in &matrix {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    let sidecar = ProjectionSidecar {
        cue: kind.as_str().into(),
        seed,
        rows: LATENT_CHANNELS,
        cols: kind.raw_channels(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_vec_pretty(&sidecar)?)?;
    Ok(())
}
