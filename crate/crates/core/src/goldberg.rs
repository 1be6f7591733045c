//! Class-I Goldberg polyhedra GP(m,0) on the layer spheres, the hemispherical cut
//! with its cylindrical skirt, and the five-fold irreducible section.
//!
//! Construction: subdivide each icosahedron face into m² triangles, push the lattice
//! points radially onto the sphere and take the dual. Dual vertices are the
//! circumcenters of the spherical triangles (the triangle-plane normals scaled to the
//! radius), so every cell vertex sits on the sphere.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{mean, planarity_deviation, polygon_area, PointIndex, Vec3};

/// Radii of the inner, middle and outer metal layers, mm.
pub const DEFAULT_LAYER_RADII: [f64; 3] = [72.5, 73.75, 75.0];
/// Cylinder skirt height below the equator, mm.
pub const DEFAULT_SKIRT_HEIGHT: f64 = 25.0;
/// Subdivision frequency used for the dome.
pub const DEFAULT_FREQUENCY: u32 = 20;

/// Half-angle of the irreducible wedge.
const WEDGE: f64 = PI / 5.0;
const ROTATION_STEP: f64 = 2.0 * PI / 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldbergSpec {
    pub m: u32,
    pub n: u32,
    /// mm.
    pub radius: f64,
    /// Put an icosahedron vertex at +z; required for the hemisphere cut and the section.
    pub vertex_at_pole: bool,
}

impl GoldbergSpec {
    pub fn new(m: u32, radius: f64) -> Self {
        Self { m, n: 0, radius, vertex_at_pole: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Domain("GP(m,0) needs m >= 1".into()));
        }
        if self.n != 0 {
            return Err(Error::Domain(format!("only class-I GP(m,0) is supported, got n = {}", self.n)));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Hexagon,
    Pentagon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Sphere,
    Cylinder,
}

/// The metal layer's surface: a sphere, or a hemisphere continued by a cylinder of the
/// same radius below z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSurface {
    pub radius: f64,
    pub skirt: bool,
}

impl LayerSurface {
    pub fn project(&self, p: &Vec3) -> Vec3 {
        if self.skirt && p.z < 0.0 {
            let rho = p.xy().norm();
            Vec3::new(p.x * self.radius / rho, p.y * self.radius / rho, p.z)
        } else {
            p * (self.radius / p.norm())
        }
    }

    pub fn distance(&self, p: &Vec3) -> f64 {
        if self.skirt && p.z < 0.0 {
            (p.xy().norm() - self.radius).abs()
        } else {
            (p.norm() - self.radius).abs()
        }
    }

    /// Outward unit normal at (the projection of) `p`.
    pub fn normal(&self, p: &Vec3) -> Vec3 {
        if self.skirt && p.z < 0.0 {
            Vec3::new(p.x, p.y, 0.0).normalize()
        } else {
            p.normalize()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TessCell {
    pub id: usize,
    pub kind: CellKind,
    /// Indices into [`GoldbergTessellation::vertices`], counter-clockwise seen from outside.
    pub vertex_ids: Vec<usize>,
    pub vertices: Vec<Vec3>,
    /// Lattice point the cell was generated from; lies on the layer surface.
    pub center: Vec3,
    /// Vertex mean.
    pub centroid: Vec3,
    /// Across-flats size for hexagons, mm.
    pub p2: Option<f64>,
    pub symmetry_class: usize,
    pub surface: Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// One entry on open boundaries, two in the interior.
    pub cells: [Option<usize>; 2],
}

impl Edge {
    pub fn cell_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldbergTessellation {
    pub spec: GoldbergSpec,
    pub surface: LayerSurface,
    pub vertices: Vec<Vec3>,
    pub cells: Vec<TessCell>,
    pub edges: Vec<Edge>,
    /// Set once the tessellation has been cut to the upper hemisphere.
    pub hemisphere: bool,
    pub skirt_height: f64,
    pub skirt_rings: usize,
}

impl GoldbergTessellation {
    pub fn radius(&self) -> f64 {
        self.spec.radius
    }

    /// `(pentagons, hexagons)`.
    pub fn counts(&self) -> (usize, usize) {
        let pent = self.cells.iter().filter(|c| c.kind == CellKind::Pentagon).count();
        (pent, self.cells.len() - pent)
    }

    /// `(V, E, F)`.
    pub fn euler(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.cells.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.euler();
        v as i64 - e as i64 + f as i64
    }

    pub fn hexagons(&self) -> impl Iterator<Item = &TessCell> {
        self.cells.iter().filter(|c| c.kind == CellKind::Hexagon)
    }

    /// Edge lookup keyed by the unordered vertex pair.
    pub fn edge_map(&self) -> HashMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(i, e)| ((e.a.min(e.b), e.a.max(e.b)), i)).collect()
    }

    /// `(min, max)` of hexagon p2, mm.
    pub fn p2_range(&self) -> Option<(f64, f64)> {
        self.hexagons().filter_map(|c| c.p2).fold(None, |acc, p| match acc {
            None => Some((p, p)),
            Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
        })
    }
}

fn icosahedron(vertex_at_pole: bool) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let verts: Vec<Vec3> = if vertex_at_pole {
        let z = 1.0 / 5f64.sqrt();
        let r = 2.0 / 5f64.sqrt();
        let mut v = vec![Vec3::new(0.0, 0.0, 1.0)];
        for k in 0..5 {
            let a = k as f64 * ROTATION_STEP;
            v.push(Vec3::new(r * a.cos(), r * a.sin(), z));
        }
        for k in 0..5 {
            let a = WEDGE + k as f64 * ROTATION_STEP;
            v.push(Vec3::new(r * a.cos(), r * a.sin(), -z));
        }
        v.push(Vec3::new(0.0, 0.0, -1.0));
        v
    } else {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            (-1.0, phi, 0.0),
            (1.0, phi, 0.0),
            (-1.0, -phi, 0.0),
            (1.0, -phi, 0.0),
            (0.0, -1.0, phi),
            (0.0, 1.0, phi),
            (0.0, -1.0, -phi),
            (0.0, 1.0, -phi),
            (phi, 0.0, -1.0),
            (phi, 0.0, 1.0),
            (-phi, 0.0, -1.0),
            (-phi, 0.0, 1.0),
        ];
        raw.iter().map(|&(x, y, z)| Vec3::new(x, y, z).normalize()).collect()
    };
    // Faces are the 20 vertex triples at minimal pairwise distance.
    let edge_len =
        (0..12).flat_map(|i| (i + 1..12).map(move |j| (i, j))).map(|(i, j)| (verts[i] - verts[j]).norm()).fold(f64::INFINITY, f64::min);
    let adjacent = |i: usize, j: usize| ((verts[i] - verts[j]).norm() - edge_len).abs() < 1e-9;
    let mut faces = Vec::with_capacity(20);
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    let n = (verts[j] - verts[i]).cross(&(verts[k] - verts[i]));
                    if n.dot(&(verts[i] + verts[j] + verts[k])) > 0.0 {
                        faces.push([i, j, k]);
                    } else {
                        faces.push([i, k, j]);
                    }
                }
            }
        }
    }
    debug_assert_eq!(faces.len(), 20);
    (verts, faces)
}

/// Lattice point as integer weights on icosahedron vertices; weights sum to m.
type LatticeKey = Vec<(usize, u32)>;

fn lattice_key(face: &[usize; 3], weights: [u32; 3]) -> LatticeKey {
    let mut key: LatticeKey = face.iter().zip(weights).filter(|(_, w)| *w > 0).map(|(v, w)| (*v, w)).collect();
    key.sort_unstable();
    key
}

/// Assemble the cell list, edges and symmetry classes from vertex cycles.
fn assemble(
    spec: GoldbergSpec,
    surface: LayerSurface,
    vertices: Vec<Vec3>,
    raw: Vec<(Vec<usize>, Vec3, Surface)>,
) -> Result<(Vec<TessCell>, Vec<Edge>)> {
    let mut cells = Vec::with_capacity(raw.len());
    for (id, (vertex_ids, center, surf)) in raw.into_iter().enumerate() {
        let kind = match vertex_ids.len() {
            5 => CellKind::Pentagon,
            6 => CellKind::Hexagon,
            n => return Err(Error::Geometry(format!("cell {id} has {n} vertices"))),
        };
        let pts: Vec<Vec3> = vertex_ids.iter().map(|&v| vertices[v]).collect();
        let mut cell =
            TessCell { id, kind, vertex_ids, centroid: mean(&pts), vertices: pts, center, p2: None, symmetry_class: id, surface: surf };
        if kind == CellKind::Hexagon {
            cell.p2 = Some(cell_p2_on(&cell, surface.radius)?);
        }
        cells.push(cell);
    }
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    for cell in &cells {
        let n = cell.vertex_ids.len();
        for i in 0..n {
            let (a, b) = (cell.vertex_ids[i], cell.vertex_ids[(i + 1) % n]);
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&e) => {
                    let slot = &mut edges[e].cells;
                    if slot[1].is_some() {
                        return Err(Error::Geometry(format!("edge {key:?} shared by more than two cells")));
                    }
                    slot[1] = Some(cell.id);
                }
                None => {
                    edge_index.insert(key, edges.len());
                    edges.push(Edge { a: key.0, b: key.1, cells: [Some(cell.id), None] });
                }
            }
        }
    }
    if spec.vertex_at_pole {
        assign_symmetry_classes(&mut cells, spec.radius);
    }
    Ok((cells, edges))
}

/// Builds the full-sphere GP(m,0) tessellation.
pub fn build_goldberg(spec: &GoldbergSpec) -> Result<GoldbergTessellation> {
    spec.validate()?;
    let m = spec.m;
    let radius = spec.radius;
    let (ico, faces) = icosahedron(spec.vertex_at_pole);

    let mut lattice: HashMap<LatticeKey, usize> = HashMap::new();
    let mut seeds: Vec<Vec3> = Vec::new();
    let mut id_of = |key: LatticeKey| -> usize {
        *lattice.entry(key).or_insert_with_key(|k| {
            let flat: Vec3 = k.iter().map(|&(v, w)| ico[v] * w as f64).sum::<Vec3>() / m as f64;
            seeds.push(flat.normalize() * radius);
            seeds.len() - 1
        })
    };
    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(20 * (m * m) as usize);
    for face in &faces {
        let mut at = |i: u32, j: u32| id_of(lattice_key(face, [m - i - j, i, j]));
        for i in 0..m {
            for j in 0..(m - i) {
                triangles.push([at(i, j), at(i + 1, j), at(i, j + 1)]);
                if i + j + 1 < m {
                    triangles.push([at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
                }
            }
        }
    }

    // Dual vertices: circumcenters on the sphere.
    let dual: Vec<Vec3> = triangles
        .iter()
        .map(|t| {
            let (a, b, c) = (seeds[t[0]], seeds[t[1]], seeds[t[2]]);
            (b - a).cross(&(c - a)).normalize() * radius
        })
        .collect();

    // Walk the triangles around each seed counter-clockwise.
    let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 3);
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            directed.insert((t[k], t[(k + 1) % 3]), ti);
        }
    }
    let mut first_tri: Vec<Option<usize>> = vec![None; seeds.len()];
    for (ti, t) in triangles.iter().enumerate() {
        for &v in t {
            first_tri[v].get_or_insert(ti);
        }
    }
    let mut raw = Vec::with_capacity(seeds.len());
    for (v, start) in first_tri.iter().enumerate() {
        let start = start.ok_or_else(|| Error::Geometry(format!("lattice point {v} has no triangle")))?;
        let mut ring = Vec::with_capacity(6);
        let mut tri = start;
        loop {
            ring.push(tri);
            let t = triangles[tri];
            let pos = t.iter().position(|&x| x == v).expect("seed in its triangle");
            let third = t[(pos + 2) % 3];
            tri = *directed.get(&(v, third)).ok_or_else(|| Error::Geometry(format!("open fan around lattice point {v}")))?;
            if tri == start || ring.len() > 6 {
                break;
            }
        }
        raw.push((ring, seeds[v], Surface::Sphere));
    }

    let surface = LayerSurface { radius, skirt: false };
    let (cells, edges) = assemble(*spec, surface, dual.clone(), raw)?;
    Ok(GoldbergTessellation { spec: *spec, surface, vertices: dual, cells, edges, hemisphere: false, skirt_height: 0.0, skirt_rings: 0 })
}

/// Developed (unrolled) coordinates on the skirt cylinder: arc length `u = Rφ` and height.
fn develop(p: &Vec3, radius: f64, phi_ref: f64) -> [f64; 2] {
    let mut phi = p.y.atan2(p.x) - phi_ref;
    while phi > PI {
        phi -= 2.0 * PI;
    }
    while phi < -PI {
        phi += 2.0 * PI;
    }
    [radius * phi, p.z]
}

fn cell_p2_on(cell: &TessCell, radius: f64) -> Result<f64> {
    if cell.kind != CellKind::Hexagon {
        return Err(Error::Kind(format!("cell {} is a pentagon; p2 is defined for hexagons", cell.id)));
    }
    let scale = cell.vertices.iter().map(|v| (v - cell.centroid).norm()).fold(0.0, f64::max);
    for i in 0..6 {
        if (cell.vertices[i] - cell.vertices[(i + 1) % 6]).norm() <= 1e-9 * scale.max(1e-300) {
            return Err(Error::Geometry(format!("cell {} has repeated vertices", cell.id)));
        }
    }
    let mids: Vec<Vec3> = if cell.surface == Surface::Cylinder {
        let phi_ref = cell.center.y.atan2(cell.center.x);
        let flat: Vec<[f64; 2]> = cell.vertices.iter().map(|v| develop(v, radius, phi_ref)).collect();
        (0..6)
            .map(|i| {
                let (a, b) = (flat[i], flat[(i + 1) % 6]);
                Vec3::new((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, 0.0)
            })
            .collect()
    } else {
        (0..6).map(|i| (cell.vertices[i] + cell.vertices[(i + 1) % 6]) / 2.0).collect()
    };
    Ok((0..3).map(|i| (mids[i] - mids[i + 3]).norm()).sum::<f64>() / 3.0)
}

/// Across-flats size of a hexagonal cell: mean distance between midpoints of opposite
/// edges. Skirt cells are measured on the developed cylinder.
pub fn cell_p2(cell: &TessCell) -> Result<f64> {
    let radius = if cell.surface == Surface::Cylinder { cell.center.xy().norm() } else { cell.center.norm() };
    cell_p2_on(cell, radius)
}

/// Twice the smallest distance from the cell center to an edge midpoint: the local
/// minimum center-to-center pitch of the lattice around the cell.
pub fn cell_min_pitch(cell: &TessCell) -> f64 {
    let n = cell.vertices.len();
    (0..n).map(|i| ((cell.vertices[i] + cell.vertices[(i + 1) % n]) / 2.0 - cell.center).norm()).fold(f64::INFINITY, f64::min) * 2.0
}

/// Distance of the farthest vertex from the cell's best-fit plane.
pub fn cell_flatness(cell: &TessCell) -> f64 {
    planarity_deviation(&cell.vertices)
}

/// Planar facet area of a cell.
pub fn cell_area(cell: &TessCell) -> f64 {
    polygon_area(&cell.vertices)
}

/// A rigid motion of the five-fold dome symmetry group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SymmetryOp {
    /// Reflection across the xz meridian plane (y -> -y).
    MirrorXz,
    /// Rotation about +z by the given angle, degrees.
    RotateZ { degrees: f64 },
}

impl SymmetryOp {
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        match *self {
            SymmetryOp::MirrorXz => Vec3::new(p.x, -p.y, p.z),
            SymmetryOp::RotateZ { degrees } => {
                let (s, c) = degrees.to_radians().sin_cos();
                Vec3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
            }
        }
    }

    pub fn reverses_orientation(&self) -> bool {
        matches!(self, SymmetryOp::MirrorXz)
    }
}

/// The ten group elements generated by `{mirror} x {rotations}`, each as the list of
/// ops to apply in order.
pub fn group_elements() -> Vec<Vec<SymmetryOp>> {
    let mut out = Vec::with_capacity(10);
    for mirror in [false, true] {
        for k in 0..5 {
            let mut ops = Vec::new();
            if mirror {
                ops.push(SymmetryOp::MirrorXz);
            }
            if k > 0 {
                ops.push(SymmetryOp::RotateZ { degrees: 72.0 * k as f64 });
            }
            out.push(ops);
        }
    }
    out
}

pub fn apply_ops(ops: &[SymmetryOp], p: &Vec3) -> Vec3 {
    ops.iter().fold(*p, |q, op| op.apply(&q))
}

/// Folds a point into the wedge 0 <= φ <= 36° using the five-fold dihedral group.
fn canonical(p: &Vec3) -> Vec3 {
    let rho = p.xy().norm();
    if rho == 0.0 {
        return *p;
    }
    let mut phi = p.y.atan2(p.x).rem_euclid(ROTATION_STEP);
    if phi > WEDGE {
        phi = ROTATION_STEP - phi;
    }
    Vec3::new(rho * phi.cos(), rho * phi.sin(), p.z)
}

fn assign_symmetry_classes(cells: &mut [TessCell], radius: f64) {
    let tol = 1e-6 * radius.max(1.0);
    let mut reps = PointIndex::new(tol * 4.0);
    for cell in cells.iter_mut() {
        let c = canonical(&cell.center);
        cell.symmetry_class = match reps.find(&c, tol) {
            Some(id) => id,
            None => reps.insert(c),
        };
    }
}

/// Keeps the cells whose lattice point has z >= 0 (so the equatorial row is retained
/// whole) and, for `skirt_height > 0`, continues the equatorial rows down a cylinder of
/// the same radius.
pub fn hemisphere_with_skirt(tess: &GoldbergTessellation, skirt_height: f64) -> Result<GoldbergTessellation> {
    if !tess.spec.vertex_at_pole {
        return Err(Error::Orientation("hemisphere cut needs an icosahedron vertex at +z".into()));
    }
    if tess.hemisphere {
        return Err(Error::Usage("tessellation is already a hemisphere".into()));
    }
    if !(skirt_height >= 0.0) || !skirt_height.is_finite() {
        return Err(Error::Domain(format!("skirt height must be >= 0, got {skirt_height}")));
    }
    let radius = tess.radius();
    let tol = 1e-9 * radius;
    let kept: Vec<&TessCell> = tess.cells.iter().filter(|c| c.center.z >= -tol).collect();

    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut raw: Vec<(Vec<usize>, Vec3, Surface)> = Vec::with_capacity(kept.len());
    for cell in &kept {
        let ids = cell
            .vertex_ids
            .iter()
            .map(|&v| {
                *remap.entry(v).or_insert_with(|| {
                    vertices.push(tess.vertices[v]);
                    vertices.len() - 1
                })
            })
            .collect();
        raw.push((ids, cell.center, Surface::Sphere));
    }

    let skirt = skirt_height > 0.0;
    let surface = LayerSurface { radius, skirt };
    let mut rings = 0;
    if skirt {
        // Vertices hanging below the equator move onto the cylinder, keeping azimuth
        // and meridian arc length.
        for v in vertices.iter_mut() {
            if v.z < 0.0 {
                let lat = (v.z / radius).asin();
                let rho = v.xy().norm();
                *v = Vec3::new(v.x * radius / rho, v.y * radius / rho, radius * lat);
            }
        }
        rings = append_skirt(&mut vertices, &mut raw, radius, skirt_height)?;
    }

    let spec = tess.spec;
    let (cells, edges) = assemble(spec, surface, vertices.clone(), raw)?;
    Ok(GoldbergTessellation { spec, surface, vertices, cells, edges, hemisphere: true, skirt_height, skirt_rings: rings })
}

/// Ordered closed boundary of the kept cells: alternating tips (local z minima) and
/// shoulders, in increasing azimuth, starting at a tip.
fn seam_loop(vertices: &[Vec3], raw: &[(Vec<usize>, Vec3, Surface)]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for (ids, _, _) in raw {
        for i in 0..ids.len() {
            let (a, b) = (ids[i], ids[(i + 1) % ids.len()]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut nbrs: HashMap<usize, Vec<usize>> = HashMap::new();
    for (&(a, b), &n) in &count {
        if n == 1 {
            nbrs.entry(a).or_default().push(b);
            nbrs.entry(b).or_default().push(a);
        }
    }
    if nbrs.is_empty() || nbrs.values().any(|v| v.len() != 2) {
        return Err(Error::Geometry("hemisphere boundary is not a single closed loop".into()));
    }
    let azimuth = |v: usize| vertices[v].y.atan2(vertices[v].x).rem_euclid(2.0 * PI);
    let start = *nbrs.keys().min().expect("non-empty");
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = nbrs[&start][0];
    while cur != start {
        order.push(cur);
        let next = if nbrs[&cur][0] == prev { nbrs[&cur][1] } else { nbrs[&cur][0] };
        prev = cur;
        cur = next;
        if order.len() > nbrs.len() {
            return Err(Error::Geometry("hemisphere boundary has more than one loop".into()));
        }
    }
    if order.len() != nbrs.len() {
        return Err(Error::Geometry("hemisphere boundary has more than one loop".into()));
    }
    // Orient by increasing azimuth.
    let step = (azimuth(order[1]) - azimuth(order[0]) + 3.0 * PI).rem_euclid(2.0 * PI) - PI;
    if step < 0.0 {
        order.reverse();
    }
    let n = order.len();
    let first_tip = (0..n).filter(|&i| is_tip_at(&order, vertices, i)).min_by(|&a, &b| azimuth(order[a]).total_cmp(&azimuth(order[b])));
    let first_tip = first_tip.ok_or_else(|| Error::Geometry("seam has no tips".into()))?;
    order.rotate_left(first_tip);
    if n % 2 != 0 || !(0..n).all(|i| is_tip_at(&order, vertices, i) == (i % 2 == 0)) {
        return Err(Error::Geometry("seam does not alternate between tips and shoulders".into()));
    }
    let tips = order.iter().step_by(2).copied().collect();
    let shoulders = order.iter().skip(1).step_by(2).copied().collect();
    Ok((tips, shoulders))
}

fn is_tip_at(order: &[usize], vertices: &[Vec3], i: usize) -> bool {
    let n = order.len();
    let z = vertices[order[i]].z;
    z < vertices[order[(i + n - 1) % n]].z && z < vertices[order[(i + 1) % n]].z
}

/// Appends skirt rows below the seam and returns the number of rows added.
fn append_skirt(vertices: &mut Vec<Vec3>, raw: &mut Vec<(Vec<usize>, Vec3, Surface)>, radius: f64, skirt_height: f64) -> Result<usize> {
    let (tips, shoulders) = seam_loop(vertices, raw)?;
    let n = tips.len();
    let unit = 2.0 * tips.iter().zip(&shoulders).map(|(&t, &s)| vertices[s].z - vertices[t].z).sum::<f64>() / n as f64;
    if !(unit > 0.0) {
        return Err(Error::Geometry("degenerate seam pitch".into()));
    }
    let mut shifted: HashMap<(usize, u32), usize> = HashMap::new();
    let mut vertex = |seam: usize, k: u32, vertices: &mut Vec<Vec3>| -> usize {
        if k == 0 {
            return seam;
        }
        *shifted.entry((seam, k)).or_insert_with(|| {
            let p = vertices[seam];
            vertices.push(Vec3::new(p.x, p.y, p.z - k as f64 * unit));
            vertices.len() - 1
        })
    };
    let mut rows = 0usize;
    loop {
        let j = (rows / 2) as u32 * 3;
        let under_shoulder = rows.is_multiple_of(2);
        let mut lowest_top = f64::NEG_INFINITY;
        for i in 0..n {
            let cycle: [(usize, u32); 6] = if under_shoulder {
                let (t0, s, t1) = (tips[i], shoulders[i], tips[(i + 1) % n]);
                [(s, 2), (t1, 1), (t1, 0), (s, 0), (t0, 0), (t0, 1)]
            } else {
                let (sp, t, s) = (shoulders[(i + n - 1) % n], tips[i], shoulders[i]);
                [(t, 3), (s, 3), (s, 2), (t, 1), (sp, 2), (sp, 3)]
            };
            let ids: Vec<usize> = cycle.iter().map(|&(v, k)| vertex(v, k + j, vertices)).collect();
            let pts: Vec<Vec3> = ids.iter().map(|&v| vertices[v]).collect();
            let phi_ref = pts[0].y.atan2(pts[0].x);
            let flat: Vec<[f64; 2]> = pts.iter().map(|p| develop(p, radius, phi_ref)).collect();
            let u = flat.iter().map(|f| f[0]).sum::<f64>() / 6.0;
            let z = flat.iter().map(|f| f[1]).sum::<f64>() / 6.0;
            let phi = phi_ref + u / radius;
            let center = Vec3::new(radius * phi.cos(), radius * phi.sin(), z);
            // Bottom boundary of this row: the cycle's first three vertices.
            let shoulder_z = pts[1].z.max(pts[0].z);
            lowest_top = lowest_top.max(shoulder_z);
            raw.push((ids, center, Surface::Cylinder));
        }
        rows += 1;
        if lowest_top <= -skirt_height || rows > 10_000 {
            break;
        }
    }
    Ok(rows)
}

/// The irreducible wedge of an oriented dome and the operations that rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreducibleSection {
    /// Cells whose lattice point lies in 0 <= φ <= 36° (the polar cell included).
    pub cell_ids: Vec<usize>,
    /// Mirror across the xz plane, then rotations by 72°, 144°, 216° and 288°.
    pub operations: Vec<SymmetryOp>,
}

impl IrreducibleSection {
    /// Cell centroids generated by applying every group element to the section.
    pub fn reconstruct(&self, tess: &GoldbergTessellation) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(self.cell_ids.len() * 10);
        for ops in group_elements() {
            for &id in &self.cell_ids {
                out.push(apply_ops(&ops, &tess.cells[id].centroid));
            }
        }
        out
    }
}

/// Cell-for-cell comparison of a reconstruction against the tessellation:
/// `(missing cells, images matching no cell)`.
pub fn reconstruction_mismatch(tess: &GoldbergTessellation, images: &[Vec3], tol: f64) -> (usize, usize) {
    let mut index = PointIndex::new(tol * 4.0);
    for cell in &tess.cells {
        index.insert(cell.centroid);
    }
    let mut hit = vec![false; tess.cells.len()];
    let mut extra = 0;
    for p in images {
        match index.find(p, tol) {
            Some(id) => hit[id] = true,
            None => extra += 1,
        }
    }
    (hit.iter().filter(|h| !**h).count(), extra)
}

/// Centroid-match tolerance for symmetry reconstruction, mm.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

pub fn irreducible_section(tess: &GoldbergTessellation) -> Result<IrreducibleSection> {
    if !tess.spec.vertex_at_pole {
        return Err(Error::Orientation("irreducible section needs an icosahedron vertex at +z".into()));
    }
    let ang_tol = 1e-9;
    let cell_ids: Vec<usize> = tess
        .cells
        .iter()
        .filter(|c| {
            let p = c.center;
            if p.xy().norm() <= 1e-9 * tess.radius() {
                return true;
            }
            let phi = p.y.atan2(p.x);
            phi >= -ang_tol && phi <= WEDGE + ang_tol
        })
        .map(|c| c.id)
        .collect();
    let mut operations = vec![SymmetryOp::MirrorXz];
    operations.extend((1..5).map(|k| SymmetryOp::RotateZ { degrees: 72.0 * k as f64 }));
    let section = IrreducibleSection { cell_ids, operations };
    let (missing, extra) = reconstruction_mismatch(tess, &section.reconstruct(tess), RECONSTRUCTION_TOL);
    if missing > 0 || extra > 0 {
        return Err(Error::Symmetry(format!("five-fold reconstruction leaves {missing} cells uncovered and {extra} stray images")));
    }
    Ok(section)
}

/// One full-sphere tessellation per layer radius.
pub fn layer_tessellations(layer_radii: &[f64], m: u32) -> Result<Vec<GoldbergTessellation>> {
    if layer_radii.iter().any(|r| !(*r > 0.0)) || layer_radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("layer radii must be positive and increasing".into()));
    }
    layer_radii.par_iter().map(|&r| build_goldberg(&GoldbergSpec::new(m, r))).collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: usize,
    pub kind: CellKind,
    pub surface: Surface,
    pub vertices: Vec<[f64; 3]>,
    pub p2: Option<f64>,
    pub symmetry_class: usize,
}

/// On-disk tessellation schema (`units: mm`).
#[derive(Debug, Serialize, Deserialize)]
pub struct TessellationFile {
    pub schema: String,
    pub units: String,
    pub m: u32,
    pub radius: f64,
    pub hemisphere: bool,
    pub skirt_height: f64,
    pub skirt_rings: usize,
    pub pentagons: usize,
    pub hexagons: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub cells: Vec<CellRecord>,
}

pub const TESSELLATION_SCHEMA: &str = "fssdome.tessellation/1";

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl TessellationFile {
    pub fn from_tessellation(t: &GoldbergTessellation) -> Self {
        let (pentagons, hexagons) = t.counts();
        Self {
            schema: TESSELLATION_SCHEMA.into(),
            units: "mm".into(),
            m: t.spec.m,
            radius: t.radius(),
            hemisphere: t.hemisphere,
            skirt_height: t.skirt_height,
            skirt_rings: t.skirt_rings,
            pentagons,
            hexagons,
            vertex_count: t.vertices.len(),
            edge_count: t.edges.len(),
            cells: t
                .cells
                .iter()
                .map(|c| CellRecord {
                    id: c.id,
                    kind: c.kind,
                    surface: c.surface,
                    vertices: c.vertices.iter().map(|v| [round6(v.x), round6(v.y), round6(v.z)]).collect(),
                    p2: c.p2.map(round6),
                    symmetry_class: c.symmetry_class,
                })
                .collect(),
        }
    }
}
