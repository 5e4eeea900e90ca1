//! Hand-object proximity: signed distance queries and penetration depth.
//!
//! Distances use a small AABB tree over the object triangles; containment is a
//! parity ray cast along a fixed off-axis direction so axis-aligned geometry
//! cannot produce edge-grazing rays.

use nalgebra::{Point3, Vector3};

use super::{MeshError, TriMesh};

/// Maximum hand-vertex penetration into a watertight object mesh, in meters.
///
/// For every hand vertex inside the object the distance to the object surface
/// is taken; the result is the largest such distance, or 0.0 when no vertex is
/// inside. Errors with [`MeshError::NonWatertight`] when the object fails the
/// edge-manifold check.
pub fn penetration_depth(hand_mesh: &TriMesh, object_mesh: &TriMesh) -> Result<f64, MeshError> {
    object_mesh.check_watertight()?;
    // Cheap reject: disjoint bounding boxes cannot penetrate.
    let (alo, ahi) = hand_mesh.aabb();
    let (blo, bhi) = object_mesh.aabb();
    if (0..3).any(|k| ahi[k] < blo[k] || bhi[k] < alo[k]) {
        return Ok(0.0);
    }
    let tree = AabbTree::build(object_mesh);
    let mut depth: f64 = 0.0;
    for v in hand_mesh.vertices() {
        if tree.contains(v) {
            depth = depth.max(tree.distance(v));
        }
    }
    Ok(depth)
}

/// Unsigned distance from a point to a triangle (Ericson's region method).
pub(crate) fn point_triangle_distance(p: &Point3<f64>, tri: &[Point3<f64>; 3]) -> f64 {
    let (a, b, c) = (tri[0], tri[1], tri[2]);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (ap - t * ab).norm();
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (ap - t * ac).norm();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - t * (c - b)).norm();
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (ap - v * ab - w * ac).norm()
}

/// Moller-Trumbore intersection; returns the ray parameter of a forward hit.
fn ray_triangle(origin: &Point3<f64>, dir: &Vector3<f64>, tri: &[Point3<f64>; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - tri[0];
    let u = tvec.dot(&pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&qvec) * inv_det;
    (t > 1e-12).then_some(t)
}

fn parity_ray_direction() -> Vector3<f64> {
    Vector3::new(1.0, 0.5, 0.25).normalize()
}

struct Node {
    lo: Point3<f64>,
    hi: Point3<f64>,
    // Leaf: triangle index range into `order`; inner: child node indices.
    children: Option<(usize, usize)>,
    range: (usize, usize),
}

pub(crate) struct AabbTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
    tris: Vec<[Point3<f64>; 3]>,
}

impl AabbTree {
    pub(crate) fn build(mesh: &TriMesh) -> Self {
        let tris: Vec<_> = (0..mesh.faces().len()).map(|i| mesh.triangle(i)).collect();
        let mut order: Vec<usize> = (0..tris.len()).collect();
        let mut tree = Self { nodes: Vec::new(), order: Vec::new(), tris };
        let len = order.len();
        build_node(&mut tree.nodes, &tree.tris, &mut order, 0, len);
        tree.order = order;
        tree
    }

    /// Distance from `p` to the nearest triangle.
    pub(crate) fn distance(&self, p: &Point3<f64>) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if aabb_distance(p, &node.lo, &node.hi) >= best {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    // Visit the nearer child first for tighter pruning.
                    let dl = aabb_distance(p, &self.nodes[l].lo, &self.nodes[l].hi);
                    let dr = aabb_distance(p, &self.nodes[r].lo, &self.nodes[r].hi);
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for &ti in &self.order[node.range.0..node.range.1] {
                        best = best.min(point_triangle_distance(p, &self.tris[ti]));
                    }
                }
            }
        }
        best
    }

    /// Parity ray-cast containment test.
    pub(crate) fn contains(&self, p: &Point3<f64>) -> bool {
        let dir = parity_ray_direction();
        let mut hits = 0usize;
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if !ray_intersects_aabb(p, &dir, &node.lo, &node.hi) {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for &ti in &self.order[node.range.0..node.range.1] {
                        if ray_triangle(p, &dir, &self.tris[ti]).is_some() {
                            hits += 1;
                        }
                    }
                }
            }
        }
        hits % 2 == 1
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    tris: &[[Point3<f64>; 3]],
    order: &mut [usize],
    start: usize,
    end: usize,
) -> usize {
    let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &ti in &order[start..end] {
        for v in &tris[ti] {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
    }
    let idx = nodes.len();
    nodes.push(Node { lo, hi, children: None, range: (start, end) });
    if end - start > 4 {
        let extent = hi - lo;
        let axis = (0..3).max_by(|&a, &b| extent[a].total_cmp(&extent[b])).unwrap();
        let centroid = |ti: usize| (tris[ti][0][axis] + tris[ti][1][axis] + tris[ti][2][axis]) / 3.0;
        order[start..end].sort_by(|&a, &b| centroid(a).total_cmp(&centroid(b)));
        let mid = (start + end) / 2;
        let left = build_node(nodes, tris, order, start, mid);
        let right = build_node(nodes, tris, order, mid, end);
        nodes[idx].children = Some((left, right));
    }
    idx
}

fn aabb_distance(p: &Point3<f64>, lo: &Point3<f64>, hi: &Point3<f64>) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let d = (lo[k] - p[k]).max(0.0).max(p[k] - hi[k]);
        d2 += d * d;
    }
    d2.sqrt()
}

fn ray_intersects_aabb(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    lo: &Point3<f64>,
    hi: &Point3<f64>,
) -> bool {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for k in 0..3 {
        let inv = 1.0 / dir[k];
        let (t0, t1) = ((lo[k] - origin[k]) * inv, (hi[k] - origin[k]) * inv);
        let (t0, t1) = if inv < 0.0 { (t1, t0) } else { (t0, t1) };
        tmin = tmin.max(t0);
        tmax = tmax.min(t1);
        if tmin > tmax {
            return false;
        }
    }
    true
}
