//! Articulated hand model, rigid object posing and hand-object proximity queries.
//!
//! The hand is a fixed 21-keypoint skeleton: 16 articulated joints (wrist + 3 per
//! finger) drive a skinned template mesh, and 5 fingertip keypoints ride rigidly
//! on the distal joints. A pose is 51 scalars: a global translation plus 16
//! axis-angle rotations (index 0 doubles as the global/wrist rotation).

mod distance;
pub mod obj;
mod schema;
mod template;

pub use distance::penetration_depth;
pub use obj::{load_obj, parse_obj, unit_cube};
pub use schema::{load_hand_json, save_hand_json};

use nalgebra::{Isometry3, Point3, Translation3, UnitQuaternion, Vector3};
use thiserror::Error;

/// Number of reported hand keypoints (16 articulated joints + 5 fingertips).
pub const JOINT_COUNT: usize = 21;
/// Number of articulated joints carrying a rotation in [`HandPose`].
pub const ARTICULATED_COUNT: usize = 16;
/// Number of fingers; fingertip keypoint `f` has index `16 + f`.
pub const FINGER_COUNT: usize = 5;
/// Index of the wrist (root) joint.
pub const WRIST: usize = 0;

/// Joint indices of one finger chain, proximal to tip: `[MCP, PIP, DIP, TIP]`.
pub fn finger_chain(finger: usize) -> [usize; 4] {
    assert!(finger < FINGER_COUNT);
    [1 + 3 * finger, 2 + 3 * finger, 3 + 3 * finger, ARTICULATED_COUNT + finger]
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index} but mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {0} has zero area")]
    DegenerateFace(usize),
    #[error("mesh is not watertight: edge ({0}, {1}) is shared by {2} faces")]
    NonWatertight(usize, usize, usize),
    #[error("invalid hand asset: {0}")]
    InvalidHand(String),
    #[error("obj parse error at line {line}: {message}")]
    ObjParse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Rigid triangle mesh with an instance label used by the segmentation raster.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    instance_id: u8,
}

impl TriMesh {
    /// Builds a mesh, rejecting out-of-range indices and zero-area faces.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        faces: Vec<[u32; 3]>,
        instance_id: u8,
    ) -> Result<Self, MeshError> {
        let n = vertices.len();
        for (fi, face) in faces.iter().enumerate() {
            for &v in face {
                if v as usize >= n {
                    return Err(MeshError::IndexOutOfRange { face: fi, index: v as usize, count: n });
                }
            }
            let [a, b, c] = face.map(|i| vertices[i as usize]);
            let area2 = (b - a).cross(&(c - a)).norm_squared();
            if area2 < 1e-30 {
                return Err(MeshError::DegenerateFace(fi));
            }
        }
        Ok(Self { vertices, faces, instance_id })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn instance_id(&self) -> u8 {
        self.instance_id
    }

    pub fn triangle(&self, face: usize) -> [Point3<f64>; 3] {
        self.faces[face].map(|i| self.vertices[i as usize])
    }

    /// Axis-aligned bounding box as (min, max) corners.
    pub fn aabb(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Checks that every undirected edge is shared by exactly two faces.
    pub fn check_watertight(&self) -> Result<(), MeshError> {
        let mut edges: std::collections::BTreeMap<(u32, u32), usize> = Default::default();
        for face in &self.faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        for ((a, b), count) in edges {
            if count != 2 {
                return Err(MeshError::NonWatertight(a as usize, b as usize, count));
            }
        }
        Ok(())
    }
}

/// 6-DoF rigid pose: axis-angle rotation applied first, then translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectPose {
    pub rotation: Vector3<f64>,
    pub translation: Vector3<f64>,
}

impl ObjectPose {
    pub fn identity() -> Self {
        Self { rotation: Vector3::zeros(), translation: Vector3::zeros() }
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.iter().chain(self.translation.iter()).all(|v| v.is_finite())
    }

    pub fn to_isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::from(self.translation),
            UnitQuaternion::from_scaled_axis(self.rotation),
        )
    }

    /// Recovers the axis-angle / translation form of a rigid transform.
    pub fn from_isometry(iso: &Isometry3<f64>) -> Self {
        Self { rotation: iso.rotation.scaled_axis(), translation: iso.translation.vector }
    }
}

/// 51-scalar hand pose: global translation + 16 axis-angle joint rotations.
///
/// Rotation 0 is the global/wrist rotation (about the world origin, applied
/// before the translation); rotations 1..16 act about their joint's rest
/// position in the parent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HandPose {
    pub translation: Vector3<f64>,
    pub rotations: [Vector3<f64>; ARTICULATED_COUNT],
}

impl HandPose {
    pub fn identity() -> Self {
        Self { translation: Vector3::zeros(), rotations: [Vector3::zeros(); ARTICULATED_COUNT] }
    }

    pub fn is_finite(&self) -> bool {
        self.translation.iter().all(|v| v.is_finite())
            && self.rotations.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }

    /// Total scalar parameter count (3 + 16 * 3).
    pub const PARAM_COUNT: usize = 3 + 3 * ARTICULATED_COUNT;

    /// The global wrist transform `T(translation) * R(rotations[0])`.
    pub fn root_isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::from(self.translation),
            UnitQuaternion::from_scaled_axis(self.rotations[0]),
        )
    }
}

/// Articulated 21-joint hand template with skinning weights.
#[derive(Debug, Clone)]
pub struct KinematicHand {
    parents: Vec<Option<usize>>,
    template_joints: Vec<Point3<f64>>,
    template_mesh: TriMesh,
    /// Per-vertex sparse weights over the 16 articulated joints.
    skinning: Vec<Vec<(usize, f64)>>,
    fingertip_offsets: [Vector3<f64>; FINGER_COUNT],
    /// Articulated joints ordered parent-before-child.
    eval_order: Vec<usize>,
}

impl KinematicHand {
    pub fn new(
        parents: Vec<Option<usize>>,
        template_joints: Vec<Point3<f64>>,
        template_mesh: TriMesh,
        skinning: Vec<Vec<(usize, f64)>>,
        fingertip_offsets: [Vector3<f64>; FINGER_COUNT],
    ) -> Result<Self, MeshError> {
        let invalid = |m: String| MeshError::InvalidHand(m);
        if parents.len() != JOINT_COUNT {
            return Err(invalid(format!("expected {JOINT_COUNT} parents, got {}", parents.len())));
        }
        if template_joints.len() != JOINT_COUNT {
            return Err(invalid(format!(
                "expected {JOINT_COUNT} template joints, got {}",
                template_joints.len()
            )));
        }
        if parents[WRIST].is_some() {
            return Err(invalid("joint 0 (wrist) must be the root".into()));
        }
        // Acyclicity and single root: every non-root joint must reach the wrist.
        for j in 1..JOINT_COUNT {
            let mut cur = j;
            for _ in 0..=JOINT_COUNT {
                match parents[cur] {
                    Some(p) if p < JOINT_COUNT => {
                        cur = p;
                        if cur == WRIST {
                            break;
                        }
                    }
                    Some(p) => return Err(invalid(format!("parent index {p} out of range"))),
                    None => return Err(invalid(format!("joint {j} does not reach the root"))),
                }
            }
            if cur != WRIST {
                return Err(invalid(format!("parent chain of joint {j} is cyclic")));
            }
        }
        // Fingertips must hang off articulated joints and carry no children.
        for f in 0..FINGER_COUNT {
            let tip = ARTICULATED_COUNT + f;
            match parents[tip] {
                Some(p) if p < ARTICULATED_COUNT => {}
                _ => return Err(invalid(format!("fingertip {tip} must attach to an articulated joint"))),
            }
            let rest = template_joints[parents[tip].unwrap()] + fingertip_offsets[f];
            if (rest - template_joints[tip]).norm() > 1e-6 {
                return Err(invalid(format!(
                    "fingertip {tip} template position does not match distal joint + offset"
                )));
            }
        }
        if skinning.len() != template_mesh.vertices().len() {
            return Err(invalid("skinning weight count differs from vertex count".into()));
        }
        for (vi, weights) in skinning.iter().enumerate() {
            let mut sum = 0.0;
            for &(j, w) in weights {
                if j >= ARTICULATED_COUNT {
                    return Err(invalid(format!("vertex {vi} weights non-articulated joint {j}")));
                }
                if w.is_nan() || w < 0.0 {
                    return Err(invalid(format!("vertex {vi} has negative weight {w}")));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > 1e-6 {
                return Err(invalid(format!("vertex {vi} weights sum to {sum}, expected 1")));
            }
        }
        let eval_order = topological_order(&parents);
        Ok(Self { parents, template_joints, template_mesh, skinning, fingertip_offsets, eval_order })
    }

    /// The bundled low-poly procedural template.
    pub fn template() -> Self {
        template::build()
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn template_joints(&self) -> &[Point3<f64>] {
        &self.template_joints
    }

    pub fn template_mesh(&self) -> &TriMesh {
        &self.template_mesh
    }

    pub fn skinning(&self) -> &[Vec<(usize, f64)>] {
        &self.skinning
    }

    pub fn fingertip_offsets(&self) -> &[Vector3<f64>; FINGER_COUNT] {
        &self.fingertip_offsets
    }

    /// Rest-relative posed transform of each articulated joint.
    ///
    /// `A[0] = T(translation) * R(rot_0)`; for a child `j` with parent `p` and
    /// rest position `r_j`, `A[j] = A[p] * T(r_j) * R(rot_j) * T(-r_j)`, i.e.
    /// every non-root rotation pivots about the joint's rest position.
    fn joint_transforms(&self, pose: &HandPose) -> Vec<Isometry3<f64>> {
        let mut xf = vec![Isometry3::identity(); ARTICULATED_COUNT];
        for &j in &self.eval_order {
            if j >= ARTICULATED_COUNT {
                continue;
            }
            if j == WRIST {
                xf[j] = pose.root_isometry();
            } else {
                let p = self.parents[j].expect("non-root joint has a parent");
                let r = self.template_joints[j].coords;
                let local = Translation3::from(r)
                    * UnitQuaternion::from_scaled_axis(pose.rotations[j])
                    * Translation3::from(-r);
                xf[j] = xf[p] * local;
            }
        }
        xf
    }

    /// Posed positions of all 21 keypoints, in meters.
    pub fn forward_kinematics(&self, pose: &HandPose) -> [Point3<f64>; JOINT_COUNT] {
        let xf = self.joint_transforms(pose);
        let mut joints = [Point3::origin(); JOINT_COUNT];
        for j in 0..ARTICULATED_COUNT {
            joints[j] = xf[j].transform_point(&self.template_joints[j]);
        }
        for f in 0..FINGER_COUNT {
            let tip = ARTICULATED_COUNT + f;
            let distal = self.parents[tip].expect("fingertip has a parent");
            let rest = self.template_joints[distal] + self.fingertip_offsets[f];
            joints[tip] = xf[distal].transform_point(&rest);
        }
        joints
    }

    /// Linear-blend skins the template mesh into the given pose.
    pub fn skin_mesh(&self, pose: &HandPose) -> TriMesh {
        let xf = self.joint_transforms(pose);
        let vertices = self
            .template_mesh
            .vertices()
            .iter()
            .zip(&self.skinning)
            .map(|(v, weights)| {
                let mut out = Vector3::zeros();
                for &(j, w) in weights {
                    out += w * xf[j].transform_point(v).coords;
                }
                Point3::from(out)
            })
            .collect();
        // Faces and label carry over unchanged; skinned vertices skip the
        // constructor's degeneracy validation.
        TriMesh {
            vertices,
            faces: self.template_mesh.faces().to_vec(),
            instance_id: self.template_mesh.instance_id(),
        }
    }
}

fn topological_order(parents: &[Option<usize>]) -> Vec<usize> {
    let n = parents.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        for j in 0..n {
            if placed[j] {
                continue;
            }
            match parents[j] {
                None => {
                    placed[j] = true;
                    order.push(j);
                }
                Some(p) if placed[p] => {
                    placed[j] = true;
                    order.push(j);
                }
                _ => {}
            }
        }
    }
    order
}

/// Applies a 6-DoF pose to a mesh: vertices rotated then translated.
pub fn apply_object_pose(mesh: &TriMesh, pose: &ObjectPose) -> TriMesh {
    let iso = pose.to_isometry();
    TriMesh {
        vertices: mesh.vertices().iter().map(|v| iso.transform_point(v)).collect(),
        faces: mesh.faces().to_vec(),
        instance_id: mesh.instance_id(),
    }
}
