//! Hand-keypoint skeleton rendering.
//!
//! 20 bones (wrist to fingertip chain per finger) drawn as 3 px wide lines and
//! joints as filled discs of radius 4 px at the reference 480x720 resolution;
//! both scale linearly with min(H, W) / 480. Colors are fixed per finger with
//! a white wrist. Only the projected 2-D joint positions matter: joints behind
//! the camera are skipped together with their incident bones.

use nalgebra::Point3;

use super::Camera;
use crate::hand::{finger_chain, FINGER_COUNT, JOINT_COUNT, WRIST};

pub const WRIST_COLOR: [u8; 3] = [255, 255, 255];
/// Thumb, index, middle, ring, pinky.
pub const FINGER_COLORS: [[u8; 3]; FINGER_COUNT] = [
    [229, 57, 53],
    [67, 160, 71],
    [66, 133, 244],
    [253, 216, 53],
    [171, 71, 188],
];

const REFERENCE_MIN_DIM: f64 = 480.0;
const BONE_HALF_WIDTH: f64 = 1.5;
const DISC_RADIUS: f64 = 4.0;

/// Row-major 8-bit RGB image; background stays pure black.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn black(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; 3 * width * height] }
    }

    pub fn put(&mut self, row: usize, col: usize, color: [u8; 3]) {
        let i = 3 * (row * self.width + col);
        self.data[i..i + 3].copy_from_slice(&color);
    }

    pub fn at(&self, row: usize, col: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Renders the 21-joint skeleton into a fresh image.
pub fn render_keypoints(joints: &[Point3<f64>; JOINT_COUNT], cam: &Camera) -> RgbImage {
    let mut img = RgbImage::black(cam.width, cam.height);
    let scale = cam.width.min(cam.height) as f64 / REFERENCE_MIN_DIM;
    let half_width = BONE_HALF_WIDTH * scale;
    let radius = DISC_RADIUS * scale;

    let projected: Vec<Option<(f64, f64)>> =
        joints.iter().map(|j| cam.project_point(j).ok().map(|(u, v, _)| (u, v))).collect();

    for f in 0..FINGER_COUNT {
        let [mcp, pip, dip, tip] = finger_chain(f);
        for (a, b) in [(WRIST, mcp), (mcp, pip), (pip, dip), (dip, tip)] {
            if let (Some(pa), Some(pb)) = (projected[a], projected[b]) {
                draw_segment(&mut img, pa, pb, half_width, FINGER_COLORS[f]);
            }
        }
    }
    for (j, p) in projected.iter().enumerate() {
        if let Some(center) = p {
            let color = if j == WRIST {
                WRIST_COLOR
            } else if j < 16 {
                FINGER_COLORS[(j - 1) / 3]
            } else {
                FINGER_COLORS[j - 16]
            };
            draw_disc(&mut img, *center, radius, color);
        }
    }
    img
}

fn pixel_range(lo: f64, hi: f64, pad: f64, limit: usize) -> Option<(usize, usize)> {
    let a = ((lo - pad - 0.5).ceil().max(0.0)) as i64;
    let b = ((hi + pad - 0.5).floor().min((limit - 1) as f64)) as i64;
    (a <= b && b >= 0).then(|| (a.max(0) as usize, b as usize))
}

fn draw_segment(img: &mut RgbImage, a: (f64, f64), b: (f64, f64), half_width: f64, color: [u8; 3]) {
    let Some((x0, x1)) = pixel_range(a.0.min(b.0), a.0.max(b.0), half_width, img.width) else {
        return;
    };
    let Some((y0, y1)) = pixel_range(a.1.min(b.1), a.1.max(b.1), half_width, img.height) else {
        return;
    };
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let len2 = dx * dx + dy * dy;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let t = if len2 > 0.0 {
                (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
            if ((px - qx).powi(2) + (py - qy).powi(2)).sqrt() <= half_width {
                img.put(y, x, color);
            }
        }
    }
}

fn draw_disc(img: &mut RgbImage, c: (f64, f64), radius: f64, color: [u8; 3]) {
    let Some((x0, x1)) = pixel_range(c.0, c.0, radius, img.width) else { return };
    let Some((y0, y1)) = pixel_range(c.1, c.1, radius, img.height) else { return };
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            if ((px - c.0).powi(2) + (py - c.1).powi(2)).sqrt() <= radius {
                img.put(y, x, color);
            }
        }
    }
}
