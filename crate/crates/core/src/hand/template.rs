//! Procedurally generated low-poly hand template (~730 vertices).
//!
//! The wrist joint sits at the origin; fingers extend along +y with the thumb
//! splayed toward +x. Finger order is thumb, index, middle, ring, pinky.

use nalgebra::{Point3, Vector3};

use super::{KinematicHand, TriMesh, ARTICULATED_COUNT, FINGER_COUNT, JOINT_COUNT, WRIST};

/// Hand meshes always carry segmentation label 1.
pub const HAND_INSTANCE_ID: u8 = 1;

struct Finger {
    base: Point3<f64>,
    dir: Vector3<f64>,
    lengths: [f64; 3],
    radius: f64,
}

fn fingers() -> [Finger; FINGER_COUNT] {
    let f = |base: [f64; 3], dir: [f64; 3], lengths: [f64; 3], radius: f64| Finger {
        base: Point3::new(base[0], base[1], base[2]),
        dir: Vector3::new(dir[0], dir[1], dir[2]).normalize(),
        lengths,
        radius,
    };
    [
        f([0.045, 0.015, 0.0], [0.80, 0.60, 0.0], [0.038, 0.030, 0.024], 0.0095), // thumb
        f([0.033, 0.086, 0.0], [0.06, 1.0, 0.0], [0.040, 0.024, 0.018], 0.0080),  // index
        f([0.011, 0.090, 0.0], [0.0, 1.0, 0.0], [0.043, 0.027, 0.019], 0.0082),   // middle
        f([-0.011, 0.088, 0.0], [-0.05, 1.0, 0.0], [0.040, 0.025, 0.018], 0.0078), // ring
        f([-0.032, 0.080, 0.0], [-0.12, 1.0, 0.0], [0.031, 0.019, 0.014], 0.0065), // pinky
    ]
}

const RING_SIDES: usize = 14;

pub fn build() -> KinematicHand {
    let fingers = fingers();

    // Skeleton: wrist, then MCP/PIP/DIP triples per finger, then fingertips.
    let mut parents = vec![None; JOINT_COUNT];
    let mut joints = vec![Point3::origin(); JOINT_COUNT];
    let mut tip_offsets = [Vector3::zeros(); FINGER_COUNT];
    for (f, finger) in fingers.iter().enumerate() {
        let [mcp, pip, dip, tip] = super::finger_chain(f);
        parents[mcp] = Some(WRIST);
        parents[pip] = Some(mcp);
        parents[dip] = Some(pip);
        parents[tip] = Some(dip);
        let [l1, l2, l3] = finger.lengths;
        joints[mcp] = finger.base;
        joints[pip] = finger.base + l1 * finger.dir;
        joints[dip] = finger.base + (l1 + l2) * finger.dir;
        tip_offsets[f] = l3 * finger.dir;
        // Same expression forward kinematics evaluates, for bitwise identity.
        joints[tip] = joints[dip] + tip_offsets[f];
    }

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut skinning: Vec<Vec<(usize, f64)>> = Vec::new();

    build_palm(&mut vertices, &mut faces, &mut skinning);
    for (f, finger) in fingers.iter().enumerate() {
        build_finger(f, finger, &mut vertices, &mut faces, &mut skinning);
    }

    let mesh = TriMesh::new(vertices, faces, HAND_INSTANCE_ID).expect("template mesh is valid");
    KinematicHand::new(parents, joints, mesh, skinning, tip_offsets)
        .expect("template skeleton is valid")
}

/// Subdivided box spanning the palm, skinned entirely to the wrist.
fn build_palm(
    vertices: &mut Vec<Point3<f64>>,
    faces: &mut Vec<[u32; 3]>,
    skinning: &mut Vec<Vec<(usize, f64)>>,
) {
    let (x0, x1) = (-0.040, 0.047);
    let (y0, y1) = (-0.012, 0.088);
    let (z0, z1) = (-0.013, 0.013);
    let (nx, ny) = (10usize, 8usize);
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;

    let base = vertices.len() as u32;
    fn push(
        vertices: &mut Vec<Point3<f64>>,
        skinning: &mut Vec<Vec<(usize, f64)>>,
        p: Point3<f64>,
    ) {
        vertices.push(p);
        skinning.push(vec![(WRIST, 1.0)]);
    }

    // Top and bottom grids.
    for &z in &[z1, z0] {
        for b in 0..=ny {
            for a in 0..=nx {
                push(vertices, skinning, Point3::new(x0 + a as f64 * dx, y0 + b as f64 * dy, z));
            }
        }
    }
    let top = |a: usize, b: usize| base + (b * (nx + 1) + a) as u32;
    let grid = (nx + 1) * (ny + 1);
    let bot = |a: usize, b: usize| base + (grid + b * (nx + 1) + a) as u32;

    for b in 0..ny {
        for a in 0..nx {
            faces.push([top(a, b), top(a + 1, b), top(a + 1, b + 1)]);
            faces.push([top(a, b), top(a + 1, b + 1), top(a, b + 1)]);
            faces.push([bot(a, b), bot(a + 1, b + 1), bot(a + 1, b)]);
            faces.push([bot(a, b), bot(a, b + 1), bot(a + 1, b + 1)]);
        }
    }

    // Perimeter loop (counter-clockwise seen from +z) with one mid-level ring.
    let mut loop_ab: Vec<(usize, usize)> = Vec::new();
    for a in 0..nx {
        loop_ab.push((a, 0));
    }
    for b in 0..ny {
        loop_ab.push((nx, b));
    }
    for a in (1..=nx).rev() {
        loop_ab.push((a, ny));
    }
    for b in (1..=ny).rev() {
        loop_ab.push((0, b));
    }
    let mid_base = vertices.len() as u32;
    for &(a, b) in &loop_ab {
        push(vertices, skinning, Point3::new(x0 + a as f64 * dx, y0 + b as f64 * dy, 0.5 * (z0 + z1)));
    }
    let m = loop_ab.len();
    for k in 0..m {
        let (a0, b0) = loop_ab[k];
        let (a1, b1) = loop_ab[(k + 1) % m];
        let (t0, t1) = (top(a0, b0), top(a1, b1));
        let (u0, u1) = (bot(a0, b0), bot(a1, b1));
        let (m0, m1) = (mid_base + k as u32, mid_base + ((k + 1) % m) as u32);
        faces.push([t0, m0, m1]);
        faces.push([t0, m1, t1]);
        faces.push([m0, u0, u1]);
        faces.push([m0, u1, m1]);
    }
}

/// Tapered 14-gon prism along the finger direction with cap fans.
///
/// Ring stations: base (sunk into the palm), mid-proximal, PIP, mid-middle,
/// DIP, mid-distal, near-tip; the tip cap vertex coincides with the fingertip
/// keypoint. Rings at a joint split their weight between the adjacent bones.
fn build_finger(
    f: usize,
    finger: &Finger,
    vertices: &mut Vec<Point3<f64>>,
    faces: &mut Vec<[u32; 3]>,
    skinning: &mut Vec<Vec<(usize, f64)>>,
) {
    let [mcp, pip, dip, _tip] = super::finger_chain(f);
    debug_assert!(dip < ARTICULATED_COUNT);
    let [l1, l2, l3] = finger.lengths;
    let d = finger.dir;
    let n1 = if d.cross(&Vector3::z()).norm() > 1e-9 {
        d.cross(&Vector3::z()).normalize()
    } else {
        Vector3::x()
    };
    let n2 = d.cross(&n1);

    let stations: [(f64, Vec<(usize, f64)>); 7] = [
        (0.0, vec![(WRIST, 0.5), (mcp, 0.5)]),
        (0.5 * l1, vec![(mcp, 1.0)]),
        (l1, vec![(mcp, 0.5), (pip, 0.5)]),
        (l1 + 0.5 * l2, vec![(pip, 1.0)]),
        (l1 + l2, vec![(pip, 0.5), (dip, 0.5)]),
        (l1 + l2 + 0.5 * l3, vec![(dip, 1.0)]),
        (l1 + l2 + 0.92 * l3, vec![(dip, 1.0)]),
    ];
    let total = l1 + l2 + l3;

    let ring_base = vertices.len() as u32;
    for (t, weights) in &stations {
        let radius = finger.radius * (1.0 - 0.45 * t / total);
        let center = finger.base + *t * d;
        for s in 0..RING_SIDES {
            let phi = 2.0 * std::f64::consts::PI * s as f64 / RING_SIDES as f64;
            vertices.push(center + radius * (phi.cos() * n1 + phi.sin() * n2));
            skinning.push(weights.clone());
        }
    }
    let ring = |k: usize, s: usize| ring_base + (k * RING_SIDES + s % RING_SIDES) as u32;
    for k in 0..stations.len() - 1 {
        for s in 0..RING_SIDES {
            faces.push([ring(k, s), ring(k, s + 1), ring(k + 1, s + 1)]);
            faces.push([ring(k, s), ring(k + 1, s + 1), ring(k + 1, s)]);
        }
    }

    let base_cap = vertices.len() as u32;
    vertices.push(finger.base - 0.006 * d);
    skinning.push(vec![(WRIST, 1.0)]);
    let tip_cap = vertices.len() as u32;
    vertices.push(finger.base + total * d);
    skinning.push(vec![(dip, 1.0)]);

    let last = stations.len() - 1;
    for s in 0..RING_SIDES {
        faces.push([base_cap, ring(0, s + 1), ring(0, s)]);
        faces.push([tip_cap, ring(last, s), ring(last, s + 1)]);
    }
}
