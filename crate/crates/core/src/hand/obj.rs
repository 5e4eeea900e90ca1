//! Minimal Wavefront OBJ loader: `v` and `f` records only.
//!
//! Normals, texture coordinates and material statements are ignored. Face
//! indices are 1-based; polygons with more than three vertices are fan
//! triangulated.

use std::path::Path;

use nalgebra::Point3;

use super::{MeshError, TriMesh};

pub fn load_obj(path: &Path, instance_id: u8) -> Result<TriMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_obj(&text, instance_id)
}

pub fn parse_obj(text: &str, instance_id: u8) -> Result<TriMesh, MeshError> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let err = |message: String| MeshError::ObjParse { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    let tok = fields.next().ok_or_else(|| err("vertex needs 3 coordinates".into()))?;
                    *c = tok.parse().map_err(|_| err(format!("bad coordinate '{tok}'")))?;
                }
                // A 4th (w) component is legal and ignored.
                vertices.push(Point3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in fields {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| err(format!("bad face index '{tok}'")))?;
                    if i < 1 {
                        return Err(err(format!("face index {i} must be positive 1-based")));
                    }
                    let i = (i - 1) as u32;
                    if i as usize >= vertices.len() {
                        return Err(err(format!("face index {} out of range", i + 1)));
                    }
                    idx.push(i);
                }
                if idx.len() < 3 {
                    return Err(err("face needs at least 3 vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // vn / vt / usemtl / mtllib / o / g / s etc.
            Some(_) => {}
            None => {}
        }
    }
    TriMesh::new(vertices, faces, instance_id)
}

/// Axis-aligned cube helper used by toy scenes and tests (12 triangles, watertight).
pub fn unit_cube(center: Point3<f64>, side: f64, instance_id: u8) -> TriMesh {
    let h = side / 2.0;
    let corner = |sx: f64, sy: f64, sz: f64| {
        Point3::new(center.x + sx * h, center.y + sy * h, center.z + sz * h)
    };
    let vertices = vec![
        corner(-1.0, -1.0, -1.0),
        corner(1.0, -1.0, -1.0),
        corner(1.0, 1.0, -1.0),
        corner(-1.0, 1.0, -1.0),
        corner(-1.0, -1.0, 1.0),
        corner(1.0, -1.0, 1.0),
        corner(1.0, 1.0, 1.0),
        corner(-1.0, 1.0, 1.0),
    ];
    let faces = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [2, 3, 7],
        [2, 7, 6],
        [1, 2, 6],
        [1, 6, 5],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(vertices, faces, instance_id).expect("cube is valid")
}
