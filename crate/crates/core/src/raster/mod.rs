//! Condition rendering: depth maps, instance segmentation, hand-keypoint
//! images and ground-truth tracklets from posed meshes and a pinhole camera.
//!
//! Rasterization is plain z-buffered scanline with perspective-correct depth,
//! no anti-aliasing and no back-face culling; pixel (i, j) is sampled at its
//! center (j + 0.5, i + 0.5). Depth ties go to the lower instance id, then the
//! lower triangle index, so output never depends on evaluation order.

mod files;
mod keypoints;
mod tracklets;

pub use files::{
    load_tracklets, read_depth_pfm, read_depth_png, read_rgb_png, read_seg_png, save_tracklets,
    write_depth_pfm, write_depth_png, write_rgb_png, write_seg_png,
};
pub use keypoints::{render_keypoints, RgbImage, FINGER_COLORS, WRIST_COLOR};
pub use tracklets::{generate_tracklets, Tracklet};

use nalgebra::{Isometry3, Point3};
use thiserror::Error;

use crate::hand::TriMesh;

/// Nearest renderable camera-space depth, meters.
pub const NEAR: f64 = 0.01;
/// Farthest renderable camera-space depth, meters.
pub const FAR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),
    #[error("frame 0 renders empty: no foreground to sample")]
    NoForeground,
    #[error("mesh sequence topology mismatch: {0}")]
    TopologyMismatch(String),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("bad image file: {0}")]
    BadImage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("png encode: {0}")]
    PngEncode(#[from] png::EncodingError),
    #[error("png decode: {0}")]
    PngDecode(#[from] png::DecodingError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Pinhole camera: intrinsics in pixels plus a world-to-camera transform.
#[derive(Debug, Clone)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub extrinsics: Isometry3<f64>,
}

impl Camera {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
        extrinsics: Isometry3<f64>,
    ) -> Result<Self, RasterError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(RasterError::InvalidCamera(format!("focal lengths must be positive ({fx}, {fy})")));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(RasterError::InvalidCamera(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Self { fx, fy, cx, cy, width, height, extrinsics })
    }

    /// Projects a world-space point to pixel coordinates and camera depth.
    pub fn project_point(&self, p: &Point3<f64>) -> Result<(f64, f64, f64), RasterError> {
        let c = self.extrinsics.transform_point(p);
        if c.z <= 1e-6 {
            return Err(RasterError::BehindCamera(c.z));
        }
        Ok((self.fx * c.x / c.z + self.cx, self.fy * c.y / c.z + self.cy, c.z))
    }
}

/// Per-pixel scene depth in meters; 0 marks background.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl DepthMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0.0; width * height] }
    }

    pub fn at(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }
}

/// Per-pixel instance labels: 0 background, 1 hand, 2+ object instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SegMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl SegMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height] }
    }

    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }
}

/// Keypoint images are plain 24-bit RGB rasters.
pub type KeypointImage = RgbImage;

/// Z-buffered rasterization of posed meshes into a depth and segmentation map.
pub fn rasterize(meshes: &[TriMesh], cam: &Camera) -> (DepthMap, SegMap) {
    let (w, h) = (cam.width, cam.height);
    let mut zbuf = vec![f64::INFINITY; w * h];
    let mut tie = vec![(u8::MAX, u32::MAX); w * h];
    let mut seg = SegMap::zeros(w, h);

    let mut tri_index: u32 = 0;
    for mesh in meshes {
        let id = mesh.instance_id();
        for fi in 0..mesh.faces().len() {
            let cam_tri =
                mesh.triangle(fi).map(|v| cam.extrinsics.transform_point(&v));
            for piece in clip_near(&cam_tri) {
                raster_triangle(&piece, id, tri_index, cam, &mut zbuf, &mut tie, &mut seg);
            }
            tri_index += 1;
        }
    }

    let mut depth = DepthMap::zeros(w, h);
    for (d, &z) in depth.data.iter_mut().zip(&zbuf) {
        if z.is_finite() {
            *d = z as f32;
        }
    }
    (depth, seg)
}

/// Clips a camera-space triangle against the near plane, returning 0-2 pieces.
fn clip_near(tri: &[Point3<f64>; 3]) -> Vec<[Point3<f64>; 3]> {
    let inside = |p: &Point3<f64>| p.z >= NEAR;
    if tri.iter().all(inside) {
        return vec![*tri];
    }
    let mut poly: Vec<Point3<f64>> = Vec::with_capacity(4);
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            poly.push(a);
        }
        if ia != ib {
            let t = (NEAR - a.z) / (b.z - a.z);
            poly.push(a + (b - a) * t);
        }
    }
    match poly.len() {
        0..=2 => vec![],
        n => (1..n - 1).map(|k| [poly[0], poly[k], poly[k + 1]]).collect(),
    }
}

fn raster_triangle(
    cam_tri: &[Point3<f64>; 3],
    instance: u8,
    tri_index: u32,
    cam: &Camera,
    zbuf: &mut [f64],
    tie: &mut [(u8, u32)],
    seg: &mut SegMap,
) {
    let (w, h) = (cam.width, cam.height);
    let p: Vec<(f64, f64, f64)> = cam_tri
        .iter()
        .map(|c| (cam.fx * c.x / c.z + cam.cx, cam.fy * c.y / c.z + cam.cy, c.z))
        .collect();

    let edge = |a: (f64, f64, f64), b: (f64, f64, f64), x: f64, y: f64| {
        (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0)
    };
    let area2 = edge(p[0], p[1], p[2].0, p[2].1);
    if area2 == 0.0 {
        return;
    }

    let min_u = p.iter().map(|q| q.0).fold(f64::INFINITY, f64::min);
    let max_u = p.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max);
    let min_v = p.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let max_v = p.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
    let x0 = ((min_u - 0.5).ceil().max(0.0)) as usize;
    let x1 = ((max_u - 0.5).floor().min((w - 1) as f64)) as i64;
    let y0 = ((min_v - 0.5).ceil().max(0.0)) as usize;
    let y1 = ((max_v - 0.5).floor().min((h - 1) as f64)) as i64;
    if x1 < x0 as i64 || y1 < y0 as i64 || min_u > w as f64 || min_v > h as f64 {
        return;
    }

    for y in y0..=(y1 as usize) {
        let py = y as f64 + 0.5;
        for x in x0..=(x1 as usize) {
            let px = x as f64 + 0.5;
            let w0 = edge(p[1], p[2], px, py);
            let w1 = edge(p[2], p[0], px, py);
            let w2 = edge(p[0], p[1], px, py);
            let inside = if area2 > 0.0 {
                w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0
            } else {
                w0 <= 0.0 && w1 <= 0.0 && w2 <= 0.0
            };
            if !inside {
                continue;
            }
            let inv_z = (w0 / p[0].2 + w1 / p[1].2 + w2 / p[2].2) / area2;
            if inv_z <= 0.0 {
                continue;
            }
            let z = 1.0 / inv_z;
            if !(NEAR..=FAR).contains(&z) {
                continue;
            }
            let i = y * w + x;
            let better = z < zbuf[i] || (z == zbuf[i] && (instance, tri_index) < tie[i]);
            if better {
                zbuf[i] = z;
                tie[i] = (instance, tri_index);
                seg.data[i] = instance;
            }
        }
    }
}
