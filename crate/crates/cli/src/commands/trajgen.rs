//! `trajgen`: endpoint poses in, pose-sequence JSON out, plus a physical
//! plausibility report when an object mesh is available.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use hoi_forge_core::hand::{HandPose, ObjectPose, ARTICULATED_COUNT};
use hoi_forge_core::trajectory::{
    interpolate_sequence, save_pose_sequence, validate_sequence, Endpoints, PoseSequence,
    ValidationReport,
};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HandRecord {
    trans: [f64; 3],
    rots: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    rot: [f64; 3],
    trans: [f64; 3],
}

/// Endpoint file: `{schema, h0, hT, o0, oT?}` with the pose layouts of the
/// sequence schema.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointsFile {
    schema: u32,
    h0: HandRecord,
    #[serde(rename = "hT")]
    h_end: HandRecord,
    o0: ObjectRecord,
    #[serde(rename = "oT", default, skip_serializing_if = "Option::is_none")]
    o_end: Option<ObjectRecord>,
}

fn hand_from_record(rec: &HandRecord, what: &str) -> CliResult<HandPose> {
    if rec.rots.len() != ARTICULATED_COUNT {
        return Err(CliError::Schema(format!(
            "{what}: expected {ARTICULATED_COUNT} joint rotations, got {}",
            rec.rots.len()
        )));
    }
    let mut pose = HandPose::identity();
    pose.translation = Vector3::from(rec.trans);
    for (dst, &[x, y, z]) in pose.rotations.iter_mut().zip(&rec.rots) {
        *dst = Vector3::new(x, y, z);
    }
    if !pose.is_finite() {
        return Err(CliError::Schema(format!("{what}: non-finite pose values")));
    }
    Ok(pose)
}

fn object_from_record(rec: &ObjectRecord, what: &str) -> CliResult<ObjectPose> {
    let pose = ObjectPose { rotation: Vector3::from(rec.rot), translation: Vector3::from(rec.trans) };
    if !pose.is_finite() {
        return Err(CliError::Schema(format!("{what}: non-finite pose values")));
    }
    Ok(pose)
}

pub fn load_endpoints(path: &Path) -> CliResult<Endpoints> {
    let text = std::fs::read(path)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    let file: EndpointsFile = serde_json::from_slice(&text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    if file.schema != 1 {
        return Err(CliError::Schema(format!(
            "{}: unsupported endpoints schema {}",
            path.display(),
            file.schema
        )));
    }
    Ok(Endpoints {
        start_hand: hand_from_record(&file.h0, "h0")?,
        start_object: object_from_record(&file.o0, "o0")?,
        end_hand: hand_from_record(&file.h_end, "hT")?,
        end_object: file.o_end.as_ref().map(|o| object_from_record(o, "oT")).transpose()?,
    })
}

pub struct TrajgenOutcome {
    pub sequence: PoseSequence,
    pub validation: Option<ValidationReport>,
}

pub fn run(
    config: &PipelineConfig,
    endpoints_path: &Path,
    out: &Path,
    object_override: Option<&Path>,
) -> CliResult<TrajgenOutcome> {
    let endpoints = load_endpoints(endpoints_path)?;
    let traj_cfg = config.trajectory_config()?;
    let sequence = interpolate_sequence(&endpoints, &traj_cfg);
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    save_pose_sequence(out, &sequence)?;

    let validation = match super::load_object(config, object_override)? {
        Some(object) => {
            let hand = super::load_hand(config)?;
            Some(validate_sequence(&sequence, &hand, &object, &traj_cfg, Some(&endpoints))?)
        }
        None => None,
    };
    Ok(TrajgenOutcome { sequence, validation })
}
