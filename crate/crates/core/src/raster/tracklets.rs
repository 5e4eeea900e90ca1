//! Ground-truth 2-D tracklet generation from posed mesh sequences.
//!
//! Surface points are sampled once at frame 0 by area-weighted triangle
//! sampling with a seeded RNG, attached barycentrically to their triangle and
//! re-projected every frame. A point is visible when its camera depth agrees
//! with the rendered depth map at its pixel within a small tolerance, so
//! occluded frames keep their projected position with the flag cleared.

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rasterize, Camera, RasterError};
use crate::hand::TriMesh;

/// Depth agreement tolerance for the visibility flag, meters (1 mm).
pub const VISIBILITY_DEPTH_TOLERANCE: f64 = 1e-3;

/// One tracked surface point: per-frame pixel positions and visibility flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracklet {
    pub points: Vec<[f64; 2]>,
    pub visibility: Vec<bool>,
}

impl Tracklet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples `n` seeded surface points at frame 0 and tracks them through every
/// frame of the posed mesh sequence.
pub fn generate_tracklets(
    mesh_sequence: &[Vec<TriMesh>],
    cam: &Camera,
    n: usize,
    seed: u64,
) -> Result<Vec<Tracklet>, RasterError> {
    let first = mesh_sequence
        .first()
        .ok_or_else(|| RasterError::TopologyMismatch("empty mesh sequence".into()))?;
    for (fi, frame) in mesh_sequence.iter().enumerate().skip(1) {
        if frame.len() != first.len() {
            return Err(RasterError::TopologyMismatch(format!(
                "frame {fi} has {} meshes, frame 0 has {}",
                frame.len(),
                first.len()
            )));
        }
        for (mi, (m, m0)) in frame.iter().zip(first).enumerate() {
            if m.instance_id() != m0.instance_id()
                || m.vertices().len() != m0.vertices().len()
                || m.faces() != m0.faces()
            {
                return Err(RasterError::TopologyMismatch(format!(
                    "frame {fi} mesh {mi} does not match frame 0 topology"
                )));
            }
        }
    }

    let depth_maps: Vec<_> = mesh_sequence.iter().map(|frame| rasterize(frame, cam).0).collect();
    if depth_maps[0].data.iter().all(|&d| d == 0.0) {
        return Err(RasterError::NoForeground);
    }

    // Deterministic sampling order: meshes sorted by instance id (stable), so
    // reordering interchangeable instances cannot change the tracklets.
    let mut mesh_order: Vec<usize> = (0..first.len()).collect();
    mesh_order.sort_by_key(|&i| first[i].instance_id());

    let mut cum_area = Vec::new();
    let mut pool = Vec::new(); // (mesh index, face index)
    let mut total = 0.0f64;
    for &mi in &mesh_order {
        let mesh = &first[mi];
        for fi in 0..mesh.faces().len() {
            let [a, b, c] = mesh.triangle(fi);
            total += 0.5 * (b - a).cross(&(c - a)).norm();
            cum_area.push(total);
            pool.push((mi, fi));
        }
    }
    if total <= 0.0 {
        return Err(RasterError::NoForeground);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.random::<f64>() * total;
        let k = cum_area.partition_point(|&c| c <= r).min(pool.len() - 1);
        let (mut a, mut b) = (rng.random::<f64>(), rng.random::<f64>());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        samples.push((pool[k], [1.0 - a - b, a, b]));
    }

    let mut tracks = vec![
        Tracklet {
            points: Vec::with_capacity(mesh_sequence.len()),
            visibility: Vec::with_capacity(mesh_sequence.len()),
        };
        n
    ];
    for (frame, depth) in mesh_sequence.iter().zip(&depth_maps) {
        for (track, &((mi, fi), bary)) in tracks.iter_mut().zip(&samples) {
            let [a, b, c] = frame[mi].triangle(fi);
            let p = Point3::from(bary[0] * a.coords + bary[1] * b.coords + bary[2] * c.coords);
            match cam.project_point(&p) {
                Ok((u, v, z)) => {
                    let (px, py) = (u.floor(), v.floor());
                    let in_bounds =
                        px >= 0.0 && py >= 0.0 && (px as usize) < cam.width && (py as usize) < cam.height;
                    let vis = in_bounds
                        && (z - depth.at(py as usize, px as usize) as f64).abs()
                            <= VISIBILITY_DEPTH_TOLERANCE;
                    track.points.push([u, v]);
                    track.visibility.push(vis);
                }
                Err(_) => {
                    // Behind the camera: hold the last known position.
                    let last = track.points.last().copied().unwrap_or([0.0, 0.0]);
                    track.points.push(last);
                    track.visibility.push(false);
                }
            }
        }
    }
    Ok(tracks)
}
