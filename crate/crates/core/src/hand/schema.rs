//! JSON schema for hand assets.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "parents": [null, 0, 1, ...],            // 21 entries, null = root
//!   "template_joints": [[x, y, z], ...],     // 21 rest positions, meters
//!   "fingertip_offsets": [[x, y, z], ...],   // 5 offsets from distal joints
//!   "mesh": { "instance_id": 1, "vertices": [[x, y, z], ...], "faces": [[a, b, c], ...] },
//!   "skinning": [[[joint, weight], ...], ...]  // sparse, per vertex
//! }
//! ```

use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::{KinematicHand, MeshError, TriMesh, FINGER_COUNT};

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HandFile {
    schema: u32,
    parents: Vec<Option<usize>>,
    template_joints: Vec<[f64; 3]>,
    fingertip_offsets: Vec<[f64; 3]>,
    mesh: MeshFile,
    skinning: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    instance_id: u8,
    vertices: Vec<[f64; 3]>,
    faces: Vec<[u32; 3]>,
}

pub fn save_hand_json(path: &Path, hand: &KinematicHand) -> Result<(), MeshError> {
    let file = HandFile {
        schema: SCHEMA_VERSION,
        parents: hand.parents().to_vec(),
        template_joints: hand.template_joints().iter().map(|p| [p.x, p.y, p.z]).collect(),
        fingertip_offsets: hand.fingertip_offsets().iter().map(|v| [v.x, v.y, v.z]).collect(),
        mesh: MeshFile {
            instance_id: hand.template_mesh().instance_id(),
            vertices: hand.template_mesh().vertices().iter().map(|p| [p.x, p.y, p.z]).collect(),
            faces: hand.template_mesh().faces().to_vec(),
        },
        skinning: hand.skinning().to_vec(),
    };
    std::fs::write(path, serde_json::to_vec_pretty(&file)?)?;
    Ok(())
}

pub fn load_hand_json(path: &Path) -> Result<KinematicHand, MeshError> {
    let text = std::fs::read(path)?;
    let file: HandFile = serde_json::from_slice(&text)?;
    if file.schema != SCHEMA_VERSION {
        return Err(MeshError::InvalidHand(format!(
            "unsupported hand schema {} (expected {SCHEMA_VERSION})",
            file.schema
        )));
    }
    if file.fingertip_offsets.len() != FINGER_COUNT {
        return Err(MeshError::InvalidHand(format!(
            "expected {FINGER_COUNT} fingertip offsets, got {}",
            file.fingertip_offsets.len()
        )));
    }
    let mesh = TriMesh::new(
        file.mesh.vertices.iter().map(|&[x, y, z]| Point3::new(x, y, z)).collect(),
        file.mesh.faces,
        file.mesh.instance_id,
    )?;
    let mut offsets = [Vector3::zeros(); FINGER_COUNT];
    for (o, &[x, y, z]) in offsets.iter_mut().zip(&file.fingertip_offsets) {
        *o = Vector3::new(x, y, z);
    }
    KinematicHand::new(
        file.parents,
        file.template_joints.iter().map(|&[x, y, z]| Point3::new(x, y, z)).collect(),
        mesh,
        file.skinning,
        offsets,
    )
}
