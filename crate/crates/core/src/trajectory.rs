//! Hand-object pose sequence synthesis and plausibility validation.
//!
//! [`interpolate_sequence`] produces a temporally coherent trajectory between
//! endpoint poses: per-joint shortest-arc quaternion slerp on an eased time
//! variable, translations by cubic Hermite with zero endpoint velocities
//! (smoothstep easing) or linearly. The object either screw-moves to a given
//! target pose or rigidly follows the wrist after a contact phase split.
//! Sequences produced elsewhere (e.g. simulator exports) travel through the
//! same JSON schema and validator.

use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hand::{
    apply_object_pose, penetration_depth, HandPose, KinematicHand, MeshError, ObjectPose, TriMesh,
    ARTICULATED_COUNT,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("invalid pose sequence: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Easing {
    Linear,
    Smoothstep,
}

impl Easing {
    pub fn apply(self, u: f64) -> f64 {
        match self {
            Easing::Linear => u,
            Easing::Smoothstep => u * u * (3.0 - 2.0 * u),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub frame_count: usize,
    /// Phase split in [0, 1] between the approach and manipulation phases.
    pub contact_fraction: f64,
    pub max_penetration_mm: f64,
    pub easing: Easing,
    pub frame_rate: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            frame_count: 49,
            contact_fraction: 0.5,
            max_penetration_mm: 5.0,
            easing: Easing::Smoothstep,
            frame_rate: 12.0,
        }
    }
}

/// Endpoint poses driving the interpolation; `end_object = None` makes the
/// object follow the wrist's relative motion after contact.
#[derive(Debug, Clone)]
pub struct Endpoints {
    pub start_hand: HandPose,
    pub start_object: ObjectPose,
    pub end_hand: HandPose,
    pub end_object: Option<ObjectPose>,
}

/// Ordered hand-object poses at a fixed frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSequence {
    frames: Vec<(HandPose, ObjectPose)>,
    frame_rate: f64,
}

impl PoseSequence {
    pub fn new(frames: Vec<(HandPose, ObjectPose)>, frame_rate: f64) -> Result<Self, TrajectoryError> {
        if frames.len() < 2 {
            return Err(TrajectoryError::Invalid(format!(
                "need at least 2 frames, got {}",
                frames.len()
            )));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(TrajectoryError::Invalid(format!("bad frame rate {frame_rate}")));
        }
        for (i, (h, o)) in frames.iter().enumerate() {
            if !h.is_finite() || !o.is_finite() {
                return Err(TrajectoryError::Invalid(format!("frame {i} has non-finite pose")));
            }
        }
        Ok(Self { frames, frame_rate })
    }

    pub fn frames(&self) -> &[(HandPose, ObjectPose)] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }
}

/// Shortest-arc spherical interpolation between two unit quaternions.
pub fn slerp_shortest(
    a: &UnitQuaternion<f64>,
    b: &UnitQuaternion<f64>,
    t: f64,
) -> UnitQuaternion<f64> {
    let mut dot = a.coords.dot(&b.coords);
    let mut bc = b.coords;
    if dot < 0.0 {
        bc = -bc;
        dot = -dot;
    }
    if dot > 1.0 - 1e-12 {
        // Nearly identical: normalized lerp avoids the 0/0 in the sine ratio.
        let c = a.coords.lerp(&bc, t);
        return UnitQuaternion::from_quaternion(Quaternion::from(c));
    }
    let theta = dot.clamp(-1.0, 1.0).acos();
    let sin_theta = theta.sin();
    let w0 = (((1.0 - t) * theta).sin()) / sin_theta;
    let w1 = ((t * theta).sin()) / sin_theta;
    UnitQuaternion::from_quaternion(Quaternion::from(w0 * a.coords + w1 * bc))
}

/// Deterministic trajectory between endpoint poses.
///
/// Frame 0 and frame F-1 are the endpoint poses exactly (cloned, not
/// recomputed). With no target object pose the object stays at its start pose
/// until the contact frame and then rigidly follows the wrist.
pub fn interpolate_sequence(endpoints: &Endpoints, cfg: &TrajectoryConfig) -> PoseSequence {
    let f = cfg.frame_count;
    assert!(f >= 2, "frame_count must be at least 2");
    let denom = (f - 1) as f64;
    let c = cfg.contact_fraction.clamp(0.0, 1.0);

    let q_start: Vec<UnitQuaternion<f64>> =
        endpoints.start_hand.rotations.iter().map(|r| UnitQuaternion::from_scaled_axis(*r)).collect();
    let q_end: Vec<UnitQuaternion<f64>> =
        endpoints.end_hand.rotations.iter().map(|r| UnitQuaternion::from_scaled_axis(*r)).collect();

    let mut hands = Vec::with_capacity(f);
    for i in 0..f {
        if i == 0 {
            hands.push(endpoints.start_hand.clone());
        } else if i == f - 1 {
            hands.push(endpoints.end_hand.clone());
        } else {
            let e = cfg.easing.apply(i as f64 / denom);
            let translation = endpoints.start_hand.translation
                + (endpoints.end_hand.translation - endpoints.start_hand.translation) * e;
            let mut rotations = [Vector3::zeros(); ARTICULATED_COUNT];
            for j in 0..ARTICULATED_COUNT {
                rotations[j] = slerp_shortest(&q_start[j], &q_end[j], e).scaled_axis();
            }
            hands.push(HandPose { translation, rotations });
        }
    }

    let objects = match &endpoints.end_object {
        Some(end) => screw_motion(&endpoints.start_object, end, f, c, cfg.easing),
        None => wrist_follow(&endpoints.start_object, &hands, f, c),
    };

    let frames = hands.into_iter().zip(objects).collect();
    PoseSequence::new(frames, cfg.frame_rate).expect("interpolated sequence is valid")
}

fn screw_motion(
    start: &ObjectPose,
    end: &ObjectPose,
    f: usize,
    contact: f64,
    easing: Easing,
) -> Vec<ObjectPose> {
    let denom = (f - 1) as f64;
    let q0 = UnitQuaternion::from_scaled_axis(start.rotation);
    let q1 = UnitQuaternion::from_scaled_axis(end.rotation);
    (0..f)
        .map(|i| {
            if i == 0 {
                *start
            } else if i == f - 1 {
                *end
            } else {
                let u = i as f64 / denom;
                let s = if contact >= 1.0 { 0.0 } else { ((u - contact) / (1.0 - contact)).clamp(0.0, 1.0) };
                let e = easing.apply(s);
                ObjectPose {
                    rotation: slerp_shortest(&q0, &q1, e).scaled_axis(),
                    translation: start.translation + (end.translation - start.translation) * e,
                }
            }
        })
        .collect()
}

fn wrist_follow(start: &ObjectPose, hands: &[HandPose], f: usize, contact: f64) -> Vec<ObjectPose> {
    let denom = (f - 1) as f64;
    let contact_frame =
        (0..f).find(|&i| i as f64 / denom >= contact).unwrap_or(f - 1);
    let w_contact_inv = hands[contact_frame].root_isometry().inverse();
    let base = start.to_isometry();
    (0..f)
        .map(|i| {
            if i <= contact_frame {
                *start
            } else {
                let m = hands[i].root_isometry() * w_contact_inv * base;
                ObjectPose::from_isometry(&m)
            }
        })
        .collect()
}

/// Physical plausibility report for a pose sequence.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub endpoint_start_ok: bool,
    pub endpoint_end_ok: bool,
    pub max_joint_speed_mps: f64,
    pub max_joint_accel_mps2: f64,
    pub penetration_per_frame_m: Vec<f64>,
    pub max_penetration_m: f64,
    pub pass: bool,
}

/// Validates a sequence against kinematic smoothness and penetration limits.
///
/// When `endpoints` is given, the first/last frames are checked for exact
/// equality with them; otherwise the endpoint flags are vacuously true.
pub fn validate_sequence(
    seq: &PoseSequence,
    hand: &KinematicHand,
    object: &TriMesh,
    cfg: &TrajectoryConfig,
    endpoints: Option<&Endpoints>,
) -> Result<ValidationReport, MeshError> {
    let frames = seq.frames();
    let fps = seq.frame_rate();

    let (endpoint_start_ok, endpoint_end_ok) = match endpoints {
        Some(e) => {
            let first = &frames[0];
            let last = &frames[frames.len() - 1];
            let end_obj_ok = match &e.end_object {
                Some(o) => last.1 == *o,
                None => true, // derived end pose; no reference to compare
            };
            (
                first.0 == e.start_hand && first.1 == e.start_object,
                last.0 == e.end_hand && end_obj_ok,
            )
        }
        None => (true, true),
    };

    let joints: Vec<_> = frames.iter().map(|(h, _)| hand.forward_kinematics(h)).collect();
    let mut max_speed = 0.0f64;
    let mut max_accel = 0.0f64;
    for i in 1..joints.len() {
        for j in 0..joints[i].len() {
            let v = (joints[i][j] - joints[i - 1][j]).norm() * fps;
            max_speed = max_speed.max(v);
        }
    }
    for i in 1..joints.len().saturating_sub(1) {
        for j in 0..joints[i].len() {
            let a = (joints[i + 1][j].coords - 2.0 * joints[i][j].coords + joints[i - 1][j].coords)
                .norm()
                * fps
                * fps;
            max_accel = max_accel.max(a);
        }
    }

    let mut penetration = Vec::with_capacity(frames.len());
    for (h, o) in frames {
        let hand_mesh = hand.skin_mesh(h);
        let posed_object = apply_object_pose(object, o);
        penetration.push(penetration_depth(&hand_mesh, &posed_object)?);
    }
    let max_penetration = penetration.iter().copied().fold(0.0f64, f64::max);
    let pass =
        endpoint_start_ok && endpoint_end_ok && max_penetration <= cfg.max_penetration_mm * 1e-3;

    Ok(ValidationReport {
        endpoint_start_ok,
        endpoint_end_ok,
        max_joint_speed_mps: max_speed,
        max_joint_accel_mps2: max_accel,
        penetration_per_frame_m: penetration,
        max_penetration_m: max_penetration,
        pass,
    })
}

// ---- file schema ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    schema: u32,
    fps: f64,
    frames: Vec<FrameRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRecord {
    hand: HandRecord,
    object: ObjectRecord,
}

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

pub fn save_pose_sequence(path: &Path, seq: &PoseSequence) -> Result<(), TrajectoryError> {
    let file = SequenceFile {
        schema: SCHEMA_VERSION,
        fps: seq.frame_rate(),
        frames: seq
            .frames()
            .iter()
            .map(|(h, o)| FrameRecord {
                hand: HandRecord {
                    trans: h.translation.into(),
                    rots: h.rotations.iter().map(|r| [r.x, r.y, r.z]).collect(),
                },
                object: ObjectRecord { rot: o.rotation.into(), trans: o.translation.into() },
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_vec_pretty(&file)?)?;
    Ok(())
}

pub fn load_pose_sequence(path: &Path) -> Result<PoseSequence, TrajectoryError> {
    let file: SequenceFile = serde_json::from_slice(&std::fs::read(path)?)?;
    if file.schema != SCHEMA_VERSION {
        return Err(TrajectoryError::Invalid(format!(
            "unsupported sequence schema {} (expected {SCHEMA_VERSION})",
            file.schema
        )));
    }
    let mut frames = Vec::with_capacity(file.frames.len());
    for (i, rec) in file.frames.iter().enumerate() {
        if rec.hand.rots.len() != ARTICULATED_COUNT {
            return Err(TrajectoryError::Invalid(format!(
                "frame {i}: expected {ARTICULATED_COUNT} joint rotations, got {}",
                rec.hand.rots.len()
            )));
        }
        let mut rotations = [Vector3::zeros(); ARTICULATED_COUNT];
        for (dst, &[x, y, z]) in rotations.iter_mut().zip(&rec.hand.rots) {
            *dst = Vector3::new(x, y, z);
        }
        frames.push((
            HandPose { translation: Vector3::from(rec.hand.trans), rotations },
            ObjectPose {
                rotation: Vector3::from(rec.object.rot),
                translation: Vector3::from(rec.object.trans),
            },
        ));
    }
    PoseSequence::new(frames, file.fps)
}
