//! Small 3D helpers shared by the tessellation and artwork code.

use std::collections::HashMap;

pub type Vec3 = nalgebra::Vector3<f64>;

/// Unit normal of a polygon by Newell's method. Zero vector for degenerate input.
pub fn newell_normal(points: &[Vec3]) -> Vec3 {
    let mut n = Vec3::zeros();
    for (i, p) in points.iter().enumerate() {
        let q = points[(i + 1) % points.len()];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    n.try_normalize(0.0).unwrap_or_else(Vec3::zeros)
}

pub fn mean(points: &[Vec3]) -> Vec3 {
    points.iter().sum::<Vec3>() / points.len() as f64
}

/// Area of a (near-)planar polygon, fanned from its vertex mean.
pub fn polygon_area(points: &[Vec3]) -> f64 {
    let c = mean(points);
    (0..points.len()).map(|i| (points[i] - c).cross(&(points[(i + 1) % points.len()] - c)).norm() / 2.0).sum()
}

/// Largest distance of any vertex from the Newell plane through the vertex mean.
pub fn planarity_deviation(points: &[Vec3]) -> f64 {
    let n = newell_normal(points);
    let c = mean(points);
    points.iter().map(|p| (p - c).dot(&n).abs()).fold(0.0, f64::max)
}

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Minimum distance between segments `p0-p1` and `q0-q1`.
pub fn segment_segment_distance(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Do the open 2D segments `a-b` and `c-d` properly cross?
pub fn segments_cross_2d(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    fn orient(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    }
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Hash grid for tolerance lookups of 3D points.
#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
    points: Vec<Vec3>,
}

impl PointIndex {
    /// `cell` must be at least as large as any query tolerance.
    pub fn new(cell: f64) -> Self {
        Self { cell, buckets: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: &Vec3) -> (i64, i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64, (p.z / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, p: Vec3) -> usize {
        let id = self.points.len();
        self.buckets.entry(self.key(&p)).or_default().push(id);
        self.points.push(p);
        id
    }

    /// Nearest stored point within `tol` of `p`.
    pub fn find(&self, p: &Vec3, tol: f64) -> Option<usize> {
        let (kx, ky, kz) = self.key(p);
        let mut best: Option<(usize, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = self.buckets.get(&(kx + dx, ky + dy, kz + dz)) else { continue };
                    for &id in ids {
                        let d = (self.points[id] - p).norm();
                        if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((id, d));
                        }
                    }
                }
            }
        }
        best.map(|(id, _)| id)
    }

    pub fn point(&self, id: usize) -> Vec3 {
        self.points[id]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
