//! Conformal metal artwork: capacitive wheel-spoke patches, the inductive wire grid,
//! the fixed pentagon motifs, design-rule checks and export.
//!
//! Each cell is drawn in its best-fit plane and the resulting points are projected
//! back onto the layer surface.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::element::{gap_for_size, wire_for_size};
use crate::error::{Error, Result};
use crate::geom::{mean, newell_normal, segment_segment_distance, segments_cross_2d, PointIndex, Vec3};
use crate::goldberg::{apply_ops, group_elements, CellKind, GoldbergTessellation, LayerSurface, TessCell};

/// Capacitive trace width of Table I, mm.
pub const DEFAULT_W_C: f64 = 0.25;
pub const DEFAULT_MIN_WIDTH: f64 = 0.15;
/// Clearance floor set by the 125 μm dispensing tip, mm.
pub const DEFAULT_MIN_GAP: f64 = 0.125;

pub const ARTWORK_SCHEMA: &str = "fssdome.artwork/1";
pub const MESH_SCHEMA: &str = "fssdome.mesh/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerId {
    InnerCap,
    MidInd,
    OuterCap,
}

impl LayerId {
    pub const ALL: [LayerId; 3] = [LayerId::InnerCap, LayerId::MidInd, LayerId::OuterCap];

    pub fn is_capacitive(self) -> bool {
        self != LayerId::MidInd
    }

    /// Position in the radius list, innermost first.
    pub fn index(self) -> usize {
        match self {
            LayerId::InnerCap => 0,
            LayerId::MidInd => 1,
            LayerId::OuterCap => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerId::InnerCap => "inner_cap",
            LayerId::MidInd => "mid_ind",
            LayerId::OuterCap => "outer_cap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Rim,
    Spoke,
    Grid,
    PentagonRim,
    PentagonSpoke,
    PentagonRing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePrimitive {
    pub kind: TraceKind,
    /// Centerline on the layer surface, mm.
    pub polyline: Vec<Vec3>,
    /// Last point joins the first.
    pub closed: bool,
    pub width: f64,
    pub layer_id: LayerId,
    /// For grid traces, the lower id of the two cells sharing the edge.
    pub cell_id: usize,
}

impl TracePrimitive {
    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.polyline.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.polyline[i], self.polyline[(i + 1) % n]))
    }

    pub fn midpoint(&self) -> Vec3 {
        mean(&self.polyline)
    }

    fn transformed(&self, f: impl Fn(&Vec3) -> Vec3) -> Vec<Vec3> {
        self.polyline.iter().map(f).collect()
    }
}

/// Fixed pentagon-cell dimensions, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonGeom {
    pub w_p: f64,
    pub g_p: f64,
    pub ring_side: f64,
    pub cap_diagonal_outer: f64,
    pub cap_diagonal_inner: f64,
}

impl Default for PentagonGeom {
    fn default() -> Self {
        Self { w_p: 0.25, g_p: 0.38, ring_side: 1.51, cap_diagonal_outer: 2.22, cap_diagonal_inner: 2.13 }
    }
}

impl PentagonGeom {
    pub fn cap_diagonal(&self, layer: LayerId) -> Option<f64> {
        match layer {
            LayerId::InnerCap => Some(self.cap_diagonal_inner),
            LayerId::OuterCap => Some(self.cap_diagonal_outer),
            LayerId::MidInd => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverrideRow {
    pub p2_mm: f64,
    pub g_mm: f64,
    pub w_l_mm: f64,
    pub w_c_mm: f64,
}

/// Per-size dimensions replacing the scaling laws; linear in p2 between rows and
/// clamped outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideTable {
    pub rows: Vec<OverrideRow>,
}

impl OverrideTable {
    pub fn new(mut rows: Vec<OverrideRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DataFormat("override table has no rows".into()));
        }
        for r in &rows {
            let vals = [r.p2_mm, r.g_mm, r.w_l_mm, r.w_c_mm];
            if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::DataFormat(format!("override row {r:?} has a non-positive entry")));
            }
        }
        rows.sort_by(|a, b| a.p2_mm.total_cmp(&b.p2_mm));
        if rows.windows(2).any(|w| w[0].p2_mm == w[1].p2_mm) {
            return Err(Error::DataFormat("override table repeats a p2 value".into()));
        }
        Ok(Self { rows })
    }

    /// The published unit cell: p2 = 4.5, g = 0.8, w_L = 0.22, w_C = 0.25.
    pub fn table_one() -> Self {
        Self { rows: vec![OverrideRow { p2_mm: 4.5, g_mm: 0.8, w_l_mm: 0.22, w_c_mm: 0.25 }] }
    }

    /// CSV with header `p2_mm,g_mm,w_l_mm,w_c_mm`; `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<OverrideRow>, _>>()?;
        Self::new(rows)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn lookup(&self, p2: f64) -> OverrideRow {
        let rows = &self.rows;
        if p2 <= rows[0].p2_mm {
            return OverrideRow { p2_mm: p2, ..rows[0] };
        }
        let last = rows[rows.len() - 1];
        if p2 >= last.p2_mm {
            return OverrideRow { p2_mm: p2, ..last };
        }
        let i = rows.partition_point(|r| r.p2_mm <= p2) - 1;
        let (a, b) = (rows[i], rows[i + 1]);
        let t = (p2 - a.p2_mm) / (b.p2_mm - a.p2_mm);
        let lerp = |x: f64, y: f64| x + t * (y - x);
        OverrideRow { p2_mm: p2, g_mm: lerp(a.g_mm, b.g_mm), w_l_mm: lerp(a.w_l_mm, b.w_l_mm), w_c_mm: lerp(a.w_c_mm, b.w_c_mm) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtworkParams {
    pub w_c: f64,
    pub overrides: Option<OverrideTable>,
    pub pentagon: PentagonGeom,
}

impl Default for ArtworkParams {
    fn default() -> Self {
        Self { w_c: DEFAULT_W_C, overrides: None, pentagon: PentagonGeom::default() }
    }
}

impl ArtworkParams {
    pub fn table_one() -> Self {
        Self { overrides: Some(OverrideTable::table_one()), ..Self::default() }
    }

    /// `(g, w_C, source)` for a hexagon of size `p2`.
    pub fn capacitive_dims(&self, p2: f64) -> Result<(f64, f64, DimensionSource)> {
        match &self.overrides {
            Some(t) => {
                let r = t.lookup(p2);
                Ok((r.g_mm, r.w_c_mm, DimensionSource::Override))
            }
            None => Ok((gap_for_size(p2)?.value, self.w_c, DimensionSource::ScalingLaw)),
        }
    }

    pub fn wire_width(&self, p2: f64) -> Result<(f64, DimensionSource)> {
        match &self.overrides {
            Some(t) => Ok((t.lookup(p2).w_l_mm, DimensionSource::Override)),
            None => Ok((wire_for_size(p2)?.value, DimensionSource::ScalingLaw)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionSource {
    ScalingLaw,
    Override,
    PentagonFixed,
}

/// Dimensions used to draw one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellProvenance {
    pub kind: CellKind,
    pub p2: Option<f64>,
    pub g: Option<f64>,
    pub w_l: Option<f64>,
    pub w_c: Option<f64>,
    pub source: DimensionSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerArtwork {
    pub layer_id: LayerId,
    pub radius: f64,
    pub surface: LayerSurface,
    pub traces: Vec<TracePrimitive>,
    pub provenance: BTreeMap<usize, CellProvenance>,
}

/// Orthonormal frame in a cell's best-fit plane, normal pointing away from the body.
struct CellFrame {
    origin: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl CellFrame {
    fn new(cell: &TessCell, surface: &LayerSurface) -> Result<Self> {
        let mut n = newell_normal(&cell.vertices);
        if n.norm() == 0.0 {
            return Err(Error::Geometry(format!("cell {} is degenerate", cell.id)));
        }
        if n.dot(&surface.normal(&cell.centroid)) < 0.0 {
            n = -n;
        }
        // Lift the plane along its normal until it touches the surface over the centroid.
        let lift = (surface.project(&cell.centroid) - cell.centroid).dot(&n);
        let origin = cell.centroid + n * lift;
        let d = cell.vertices[0] - origin;
        let e1 = (d - n * d.dot(&n)).normalize();
        let e2 = n.cross(&e1);
        Ok(Self { origin, e1, e2 })
    }

    fn to_2d(&self, p: &Vec3) -> [f64; 2] {
        let d = p - self.origin;
        [d.dot(&self.e1), d.dot(&self.e2)]
    }

    fn to_3d(&self, q: [f64; 2]) -> Vec3 {
        self.origin + self.e1 * q[0] + self.e2 * q[1]
    }
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

/// Moves every edge of a counter-clockwise polygon inward by `d`. Fails when an edge
/// collapses or flips.
fn inset_polygon(poly: &[[f64; 2]], d: f64) -> Option<Vec<[f64; 2]>> {
    let n = poly.len();
    let lines: Vec<([f64; 2], [f64; 2])> = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let dir = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
            ([a[0] - dir[1] * d, a[1] + dir[0] * d], dir)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (p, u) = lines[(i + n - 1) % n];
        let (q, v) = lines[i];
        let cross = u[0] * v[1] - u[1] * v[0];
        if cross.abs() < 1e-12 {
            return None;
        }
        let t = ((q[0] - p[0]) * v[1] - (q[1] - p[1]) * v[0]) / cross;
        out.push([p[0] + u[0] * t, p[1] + u[1] * t]);
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (c, e) = (out[i], out[(i + 1) % n]);
        let dot = (b[0] - a[0]) * (e[0] - c[0]) + (b[1] - a[1]) * (e[1] - c[1]);
        if dot <= 0.0 {
            return None;
        }
    }
    (signed_area(&out) > 0.0).then_some(out)
}

fn planar_cell(cell: &TessCell, surface: &LayerSurface) -> Result<(CellFrame, Vec<[f64; 2]>)> {
    let frame = CellFrame::new(cell, surface)?;
    let poly: Vec<[f64; 2]> = cell.vertices.iter().map(|v| frame.to_2d(v)).collect();
    if signed_area(&poly) <= 0.0 {
        return Err(Error::Orientation(format!("cell {} is not counter-clockwise from outside", cell.id)));
    }
    Ok((frame, poly))
}

fn wheel_spoke(
    frame: &CellFrame,
    rim: &[[f64; 2]],
    surface: &LayerSurface,
    width: f64,
    layer_id: LayerId,
    cell_id: usize,
    kinds: (TraceKind, TraceKind),
) -> Vec<TracePrimitive> {
    let hub = surface.project(&frame.origin);
    let rim3: Vec<Vec3> = rim.iter().map(|&q| surface.project(&frame.to_3d(q))).collect();
    let mut out = Vec::with_capacity(rim.len() + 1);
    out.push(TracePrimitive { kind: kinds.0, polyline: rim3.clone(), closed: true, width, layer_id, cell_id });
    for p in rim3 {
        out.push(TracePrimitive { kind: kinds.1, polyline: vec![hub, p], closed: false, width, layer_id, cell_id });
    }
    out
}

/// Wheel-spoke patch: a rim whose outer edge sits `g/2` inside the cell boundary and
/// spokes from the centroid to each rim corner.
pub fn capacitive_cell_artwork(
    cell: &TessCell,
    surface: &LayerSurface,
    layer_id: LayerId,
    w_c: f64,
    g: f64,
) -> Result<Vec<TracePrimitive>> {
    if cell.kind != CellKind::Hexagon {
        return Err(Error::Kind(format!("cell {} is a pentagon; use pentagon_artwork", cell.id)));
    }
    if !layer_id.is_capacitive() {
        return Err(Error::Kind(format!("layer {} is not capacitive", layer_id.name())));
    }
    if !(w_c > 0.0) || !(g > 0.0) {
        return Err(Error::InfeasibleArtwork { cell: cell.id, reason: format!("w_C = {w_c}, g = {g} must be positive") });
    }
    let (frame, poly) = planar_cell(cell, surface)?;
    let infeasible = || Error::InfeasibleArtwork { cell: cell.id, reason: format!("cell too small for g = {g} mm, w_C = {w_c} mm") };
    // The inner edge of the rim must still be a proper polygon.
    inset_polygon(&poly, g / 2.0 + w_c).ok_or_else(infeasible)?;
    let rim = inset_polygon(&poly, (g + w_c) / 2.0).ok_or_else(infeasible)?;
    Ok(wheel_spoke(&frame, &rim, surface, w_c, layer_id, cell.id, (TraceKind::Rim, TraceKind::Spoke)))
}

/// A straight grid wire along one tessellation edge.
pub fn inductive_edge_artwork(a: Vec3, b: Vec3, w_l: f64, cell_id: usize) -> Result<TracePrimitive> {
    if !(w_l > 0.0) {
        return Err(Error::InfeasibleArtwork { cell: cell_id, reason: format!("wire width {w_l} mm") });
    }
    Ok(TracePrimitive { kind: TraceKind::Grid, polyline: vec![a, b], closed: false, width: w_l, layer_id: LayerId::MidInd, cell_id })
}

fn regular_polygon(n: usize, circumradius: f64, phase: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let a = phase + 2.0 * PI * k as f64 / n as f64;
            [circumradius * a.cos(), circumradius * a.sin()]
        })
        .collect()
}

/// Fixed-size pentagon motif centered on the cell: a wheel-spoke on capacitive layers,
/// an isolated ring on the inductive layer. The first corner points at the cell's first
/// vertex.
pub fn pentagon_artwork(cell: &TessCell, surface: &LayerSurface, layer_id: LayerId, geom: &PentagonGeom) -> Result<Vec<TracePrimitive>> {
    if cell.kind != CellKind::Pentagon {
        return Err(Error::Kind(format!("cell {} is a hexagon", cell.id)));
    }
    let (frame, poly) = planar_cell(cell, surface)?;
    let inradius = (0..5)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % 5]);
            ((a[0] * b[1] - a[1] * b[0]) / (b[0] - a[0]).hypot(b[1] - a[1])).abs()
        })
        .fold(f64::INFINITY, f64::min);
    let circumradius = match geom.cap_diagonal(layer_id) {
        Some(diag) => diag / (2.0 * (2.0 * PI / 5.0).sin()),
        None => geom.ring_side / (2.0 * (PI / 5.0).sin()),
    };
    if circumradius + geom.w_p / 2.0 >= inradius {
        return Err(Error::InfeasibleArtwork {
            cell: cell.id,
            reason: format!("pentagon motif of circumradius {circumradius:.3} mm does not fit the cell"),
        });
    }
    let shape = regular_polygon(5, circumradius, 0.0);
    if layer_id.is_capacitive() {
        Ok(wheel_spoke(&frame, &shape, surface, geom.w_p, layer_id, cell.id, (TraceKind::PentagonRim, TraceKind::PentagonSpoke)))
    } else {
        let ring = shape.iter().map(|&q| surface.project(&frame.to_3d(q))).collect();
        Ok(vec![TracePrimitive {
            kind: TraceKind::PentagonRing,
            polyline: ring,
            closed: true,
            width: geom.w_p,
            layer_id,
            cell_id: cell.id,
        }])
    }
}

/// Draws one metal layer over a tessellation at the layer's radius.
pub fn build_layer(tess: &GoldbergTessellation, layer_id: LayerId, params: &ArtworkParams) -> Result<LayerArtwork> {
    let surface = tess.surface;
    let per_cell: Vec<(Vec<TracePrimitive>, CellProvenance)> = tess
        .cells
        .par_iter()
        .map(|cell| -> Result<_> {
            match (cell.kind, layer_id.is_capacitive()) {
                (CellKind::Pentagon, cap) => {
                    let traces = pentagon_artwork(cell, &surface, layer_id, &params.pentagon)?;
                    let prov = CellProvenance {
                        kind: cell.kind,
                        p2: None,
                        g: cap.then_some(params.pentagon.g_p),
                        w_l: (!cap).then_some(params.pentagon.w_p),
                        w_c: cap.then_some(params.pentagon.w_p),
                        source: DimensionSource::PentagonFixed,
                    };
                    Ok((traces, prov))
                }
                (CellKind::Hexagon, true) => {
                    let p2 = hex_p2(cell)?;
                    let (g, w_c, source) =
                        params.capacitive_dims(p2).map_err(|e| Error::InfeasibleArtwork { cell: cell.id, reason: e.to_string() })?;
                    let traces = capacitive_cell_artwork(cell, &surface, layer_id, w_c, g)?;
                    Ok((traces, CellProvenance { kind: cell.kind, p2: Some(p2), g: Some(g), w_l: None, w_c: Some(w_c), source }))
                }
                (CellKind::Hexagon, false) => {
                    let p2 = hex_p2(cell)?;
                    let (w_l, source) =
                        params.wire_width(p2).map_err(|e| Error::InfeasibleArtwork { cell: cell.id, reason: e.to_string() })?;
                    Ok((Vec::new(), CellProvenance { kind: cell.kind, p2: Some(p2), g: None, w_l: Some(w_l), w_c: None, source }))
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut traces = Vec::new();
    let mut provenance = BTreeMap::new();
    for (cell, (t, prov)) in tess.cells.iter().zip(per_cell) {
        traces.extend(t);
        provenance.insert(cell.id, prov);
    }
    if layer_id == LayerId::MidInd {
        let grid: Vec<TracePrimitive> = tess
            .edges
            .par_iter()
            .map(|e| {
                let cells: Vec<&TessCell> = e.cell_ids().map(|c| &tess.cells[c]).collect();
                let owner = cells.iter().map(|c| c.id).min().expect("edge has a cell");
                let w_l = if cells.iter().any(|c| c.kind == CellKind::Pentagon) {
                    params.pentagon.w_p
                } else {
                    let p2 = cells.iter().map(|c| hex_p2(c)).sum::<Result<f64>>()? / cells.len() as f64;
                    params.wire_width(p2).map_err(|err| Error::InfeasibleArtwork { cell: owner, reason: err.to_string() })?.0
                };
                inductive_edge_artwork(tess.vertices[e.a], tess.vertices[e.b], w_l, owner)
            })
            .collect::<Result<_>>()?;
        traces.extend(grid);
    }
    Ok(LayerArtwork { layer_id, radius: tess.radius(), surface, traces, provenance })
}

fn hex_p2(cell: &TessCell) -> Result<f64> {
    match cell.p2 {
        Some(p) => Ok(p),
        None => crate::goldberg::cell_p2(cell),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Width,
    Clearance,
    SelfIntersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub traces: Vec<usize>,
    pub cells: Vec<usize>,
    /// Offending width or clearance, mm.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrcReport {
    pub layer_id: Option<LayerId>,
    pub min_width: f64,
    pub min_gap: f64,
    pub traces_checked: usize,
    pub violations: Vec<Violation>,
}

impl DrcReport {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn shares_endpoint(a: &TracePrimitive, b: &TracePrimitive) -> bool {
    let ends = |t: &TracePrimitive| -> Vec<Vec3> {
        if t.closed {
            Vec::new()
        } else {
            vec![t.polyline[0], t.polyline[t.polyline.len() - 1]]
        }
    };
    let (ea, eb) = (ends(a), ends(b));
    ea.iter().any(|p| eb.iter().any(|q| (p - q).norm() < 1e-9))
}

/// Grid wires of one edge and the cell motif they bound are allowed to touch; motif
/// traces of one cell overlap by design.
fn exempt_pair(a: &TracePrimitive, b: &TracePrimitive) -> bool {
    let grid = |t: &TracePrimitive| t.kind == TraceKind::Grid;
    (!grid(a) && !grid(b) && a.cell_id == b.cell_id) || shares_endpoint(a, b)
}

fn self_intersects(t: &TracePrimitive, surface: &LayerSurface) -> bool {
    let segs: Vec<(Vec3, Vec3)> = t.segments().collect();
    if segs.len() < 3 {
        return false;
    }
    let c = t.midpoint();
    let n = surface.normal(&c);
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let flat = |p: &Vec3| [(p - c).dot(&e1), (p - c).dot(&e2)];
    let m = segs.len();
    for i in 0..m {
        for j in i + 2..m {
            if t.closed && i == 0 && j == m - 1 {
                continue;
            }
            if segments_cross_2d(flat(&segs[i].0), flat(&segs[i].1), flat(&segs[j].0), flat(&segs[j].1)) {
                return true;
            }
        }
    }
    false
}

/// Width, clearance and self-intersection check of one layer.
pub fn drc_check(art: &LayerArtwork, min_width: f64, min_gap: f64) -> DrcReport {
    let mut violations = Vec::new();
    for (i, t) in art.traces.iter().enumerate() {
        if t.width < min_width {
            violations.push(Violation { kind: ViolationKind::Width, traces: vec![i], cells: vec![t.cell_id], value: t.width });
        }
        if self_intersects(t, &art.surface) {
            violations.push(Violation { kind: ViolationKind::SelfIntersection, traces: vec![i], cells: vec![t.cell_id], value: 0.0 });
        }
    }

    struct Seg {
        trace: usize,
        a: Vec3,
        b: Vec3,
    }
    let segs: Vec<Seg> = art.traces.iter().enumerate().flat_map(|(i, t)| t.segments().map(move |(a, b)| Seg { trace: i, a, b })).collect();
    if !segs.is_empty() {
        let max_len = segs.iter().map(|s| (s.b - s.a).norm()).fold(0.0, f64::max);
        let max_w = art.traces.iter().map(|t| t.width).fold(0.0, f64::max);
        let bucket = (max_len + max_w + min_gap).max(1e-6);
        let key = |p: &Vec3| ((p.x / bucket).floor() as i64, (p.y / bucket).floor() as i64, (p.z / bucket).floor() as i64);
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (k, s) in segs.iter().enumerate() {
            grid.entry(key(&((s.a + s.b) / 2.0))).or_default().push(k);
        }
        let clearance: Vec<Violation> = (0..segs.len())
            .into_par_iter()
            .flat_map_iter(|k| {
                let s = &segs[k];
                let (kx, ky, kz) = key(&((s.a + s.b) / 2.0));
                let mut worst: BTreeMap<usize, f64> = BTreeMap::new();
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            let Some(ids) = grid.get(&(kx + dx, ky + dy, kz + dz)) else { continue };
                            for &o in ids {
                                let other = &segs[o];
                                if other.trace <= s.trace {
                                    continue;
                                }
                                let (ta, tb) = (&art.traces[s.trace], &art.traces[other.trace]);
                                if exempt_pair(ta, tb) {
                                    continue;
                                }
                                let gap = segment_segment_distance(&s.a, &s.b, &other.a, &other.b) - (ta.width + tb.width) / 2.0;
                                if gap < min_gap {
                                    let e = worst.entry(other.trace).or_insert(gap);
                                    *e = e.min(gap);
                                }
                            }
                        }
                    }
                }
                worst.into_iter().map(move |(o, gap)| (s.trace, o, gap))
            })
            .fold(BTreeMap::new, |mut acc: BTreeMap<(usize, usize), f64>, (a, b, gap)| {
                let e = acc.entry((a, b)).or_insert(gap);
                *e = e.min(gap);
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    let e = a.entry(k).or_insert(v);
                    *e = e.min(v);
                }
                a
            })
            .into_iter()
            .map(|((a, b), gap)| Violation {
                kind: ViolationKind::Clearance,
                traces: vec![a, b],
                cells: vec![art.traces[a].cell_id, art.traces[b].cell_id],
                value: gap,
            })
            .collect();
        violations.extend(clearance);
    }
    DrcReport { layer_id: Some(art.layer_id), min_width, min_gap, traces_checked: art.traces.len(), violations }
}

/// Number of connected components of the grid wires (joined at shared endpoints).
pub fn grid_components(art: &LayerArtwork) -> usize {
    let grid: Vec<&TracePrimitive> = art.traces.iter().filter(|t| t.kind == TraceKind::Grid).collect();
    let mut index = PointIndex::new(1e-6);
    let mut node = |p: &Vec3| match index.find(p, 1e-7) {
        Some(id) => id,
        None => index.insert(*p),
    };
    let pairs: Vec<(usize, usize)> = grid.iter().map(|t| (node(&t.polyline[0]), node(&t.polyline[t.polyline.len() - 1]))).collect();
    let n = index.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in pairs {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&x| root(&mut parent, x) == x).count()
}

/// Largest distance between a point of one polyline and the nearest point of the other,
/// symmetrised.
fn point_set_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way =
        |x: &[Vec3], y: &[Vec3]| x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one_way(a, b).max(one_way(b, a))
}

/// Worst mismatch, mm, between the layer and its image under each of the ten dome
/// symmetries. Zero for perfectly symmetric artwork.
pub fn layer_symmetry_defect(art: &LayerArtwork) -> f64 {
    let mut index = PointIndex::new(0.05);
    for t in &art.traces {
        index.insert(t.midpoint());
    }
    let by_mid: Vec<usize> = (0..art.traces.len()).collect();
    group_elements()
        .par_iter()
        .map(|ops| {
            art.traces
                .iter()
                .map(|t| {
                    let image = t.transformed(|p| apply_ops(ops, p));
                    let mid = mean(&image);
                    match index.find(&mid, 0.01) {
                        Some(id) => {
                            let other = &art.traces[by_mid[id]];
                            if other.kind != t.kind || (other.width - t.width).abs() > 1e-9 {
                                f64::INFINITY
                            } else {
                                point_set_distance(&image, &other.polyline)
                            }
                        }
                        None => f64::INFINITY,
                    }
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Worst mismatch, mm, between each cell's motif and the motif of its symmetry-class
/// representative carried over by the group element relating the two cells.
pub fn class_congruence_defect(tess: &GoldbergTessellation, art: &LayerArtwork) -> f64 {
    let mut by_cell: HashMap<usize, Vec<&TracePrimitive>> = HashMap::new();
    for t in art.traces.iter().filter(|t| t.kind != TraceKind::Grid) {
        by_cell.entry(t.cell_id).or_default().push(t);
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &tess.cells {
        reps.entry(c.symmetry_class).or_insert(c.id);
    }
    let group = group_elements();
    let tol = 1e-6 * tess.radius().max(1.0);
    tess.cells
        .par_iter()
        .map(|cell| {
            let rep = &tess.cells[reps[&cell.symmetry_class]];
            let Some(ops) = group.iter().find(|ops| (apply_ops(ops, &rep.center) - cell.center).norm() < tol) else {
                return f64::INFINITY;
            };
            let mine = by_cell.get(&cell.id).map(Vec::as_slice).unwrap_or(&[]);
            let theirs = by_cell.get(&rep.id).map(Vec::as_slice).unwrap_or(&[]);
            if mine.len() != theirs.len() {
                return f64::INFINITY;
            }
            theirs
                .iter()
                .map(|t| {
                    let image = t.transformed(|p| apply_ops(ops, p));
                    mine.iter().filter(|m| m.kind == t.kind).map(|m| point_set_distance(&image, &m.polyline)).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    GeometryJson,
    SvgPreview,
    TriangleMesh,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" | "geometry-json" => Ok(Self::GeometryJson),
            "svg" | "svg-preview" => Ok(Self::SvgPreview),
            "mesh" | "triangle-mesh" => Ok(Self::TriangleMesh),
            other => Err(Error::Usage(format!("unknown export format {other:?} (expected json, svg or mesh)"))),
        }
    }
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::GeometryJson => "json",
            Self::SvgPreview => "svg",
            Self::TriangleMesh => "mesh.txt",
        }
    }
}

/// On-disk artwork schema; lengths in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtworkFile {
    pub schema: String,
    pub units: String,
    pub layers: Vec<LayerArtwork>,
}

pub fn export_json(layers: &[LayerArtwork]) -> Result<String> {
    let file = ArtworkFile { schema: ARTWORK_SCHEMA.into(), units: "mm".into(), layers: layers.to_vec() };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

pub fn parse_json(text: &str) -> Result<ArtworkFile> {
    let file: ArtworkFile = serde_json::from_str(text)?;
    if file.schema != ARTWORK_SCHEMA {
        return Err(Error::DataFormat(format!("unsupported artwork schema {:?}", file.schema)));
    }
    Ok(file)
}

/// Azimuthal-equidistant flattening: distance from the pole measured along the surface.
pub fn flatten(p: &Vec3, surface: &LayerSurface) -> [f64; 2] {
    let r = surface.radius;
    let s = if surface.skirt && p.z < 0.0 { r * PI / 2.0 - p.z } else { r * (p.z / p.norm()).clamp(-1.0, 1.0).acos() };
    let phi = p.y.atan2(p.x);
    [s * phi.cos(), -s * phi.sin()]
}

pub fn export_svg(art: &LayerArtwork) -> String {
    let flat: Vec<Vec<[f64; 2]>> = art.traces.iter().map(|t| t.polyline.iter().map(|p| flatten(p, &art.surface)).collect()).collect();
    let extent = flat.iter().flatten().map(|q| q[0].abs().max(q[1].abs())).fold(0.0, f64::max) + 1.0;
    let size = 2.0 * extent;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.3}mm" height="{size:.3}mm" viewBox="{:.6} {:.6} {size:.6} {size:.6}">"#,
        -extent, -extent
    );
    let _ = writeln!(out, "<!-- {ARTWORK_SCHEMA} layer={} radius_mm={} -->", art.layer_id.name(), art.radius);
    let _ = writeln!(out, r#"<g fill="none" stroke="black" stroke-linecap="round" stroke-linejoin="round">"#);
    for (t, pts) in art.traces.iter().zip(&flat) {
        let coords: Vec<String> = pts.iter().map(|q| format!("{:.6},{:.6}", q[0], q[1])).collect();
        let tag = if t.closed { "polygon" } else { "polyline" };
        let _ = writeln!(out, r#"<{tag} stroke-width="{:.6}" points="{}"/>"#, t.width, coords.join(" "));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Copper thickness used for mesh ribbons, mm.
pub const MESH_THICKNESS: f64 = 0.02;

pub type Triangle = [Vec3; 3];

/// Closed box around one trace segment, sitting on the surface, outward winding.
pub fn segment_box(a: &Vec3, b: &Vec3, width: f64, thickness: f64, surface: &LayerSurface) -> Vec<Triangle> {
    let t = (b - a).normalize();
    let mut n = surface.normal(&((a + b) / 2.0));
    n = (n - t * n.dot(&t)).normalize();
    let s = n.cross(&t) * (width / 2.0);
    let up = n * thickness;
    let corners = [a - s, b - s, b + s, a + s, a - s + up, b - s + up, b + s + up, a + s + up];
    // Quads listed counter-clockwise seen from outside the box.
    let quads = [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]];
    let mut tris = Vec::with_capacity(12);
    for q in quads {
        tris.push([corners[q[0]], corners[q[1]], corners[q[2]]]);
        tris.push([corners[q[0]], corners[q[2]], corners[q[3]]]);
    }
    tris
}

pub fn trace_mesh(t: &TracePrimitive, surface: &LayerSurface) -> Vec<Vec<Triangle>> {
    t.segments().map(|(a, b)| segment_box(&a, &b, t.width, MESH_THICKNESS, surface)).collect()
}

/// ASCII triangle soup. Every segment is a separate closed solid.
pub fn export_mesh(art: &LayerArtwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {MESH_SCHEMA} units=mm layer={} radius_mm={} thickness_mm={MESH_THICKNESS}", art.layer_id.name(), art.radius);
    for (i, t) in art.traces.iter().enumerate() {
        for (j, solid) in trace_mesh(t, &art.surface).iter().enumerate() {
            let _ = writeln!(out, "solid {i} {j} {}", solid.len());
            for tri in solid {
                let _ = writeln!(
                    out,
                    "{:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
                    tri[0].x, tri[0].y, tri[0].z, tri[1].x, tri[1].y, tri[1].z, tri[2].x, tri[2].y, tri[2].z
                );
            }
        }
    }
    out
}

/// Reads the solids back from [`export_mesh`] output.
pub fn parse_mesh(text: &str) -> Result<Vec<Vec<Triangle>>> {
    let mut solids: Vec<Vec<Triangle>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if line.starts_with("solid") {
            solids.push(Vec::new());
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::DataFormat(format!("mesh line {}: {e}", lineno + 1)))?;
        if v.len() != 9 {
            return Err(Error::DataFormat(format!("mesh line {} has {} numbers", lineno + 1, v.len())));
        }
        let solid = solids.last_mut().ok_or_else(|| Error::DataFormat("triangle before any solid".into()))?;
        solid.push([Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]), Vec3::new(v[6], v[7], v[8])]);
    }
    Ok(solids)
}

pub fn signed_volume(tris: &[Triangle]) -> f64 {
    tris.iter().map(|t| t[0].dot(&t[1].cross(&t[2]))).sum::<f64>() / 6.0
}

pub fn export(layers: &[LayerArtwork], format: ExportFormat) -> Result<Vec<(LayerId, String)>> {
    match format {
        ExportFormat::GeometryJson => {
            let id = layers.first().map(|l| l.layer_id).unwrap_or(LayerId::MidInd);
            Ok(vec![(id, export_json(layers)?)])
        }
        ExportFormat::SvgPreview => Ok(layers.iter().map(|l| (l.layer_id, export_svg(l))).collect()),
        ExportFormat::TriangleMesh => Ok(layers.iter().map(|l| (l.layer_id, export_mesh(l))).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::patch_capacitance;
    use crate::goldberg::{build_goldberg, hemisphere_with_skirt, GoldbergSpec, Surface};

    const BIG: f64 = 1.0e6;

    fn flat_hexagon(id: usize, center: [f64; 2], p2: f64) -> TessCell {
        let side = p2 / 3f64.sqrt();
        let vertices: Vec<Vec3> = (0..6)
            .map(|k| {
                let a = PI / 6.0 + k as f64 * PI / 3.0;
                Vec3::new(center[0] + side * a.cos(), center[1] + side * a.sin(), BIG)
            })
            .collect();
        TessCell {
            id,
            kind: CellKind::Hexagon,
            vertex_ids: (0..6).collect(),
            centroid: mean(&vertices),
            center: mean(&vertices),
            vertices,
            p2: Some(p2),
            symmetry_class: id,
            surface: Surface::Sphere,
        }
    }

    fn big_sphere() -> LayerSurface {
        LayerSurface { radius: BIG, skirt: false }
    }

    fn small_dome(m: u32, skirt: f64) -> GoldbergTessellation {
        hemisphere_with_skirt(&build_goldberg(&GoldbergSpec::new(m, 73.75)).unwrap(), skirt).unwrap()
    }

    #[test]
    fn rim_inset_of_table_one_cell() {
        let cell = flat_hexagon(0, [0.0, 0.0], 4.5);
        let traces = capacitive_cell_artwork(&cell, &big_sphere(), LayerId::OuterCap, 0.25, 0.8).unwrap();
        assert_eq!(traces.len(), 7);
        let rim = &traces[0];
        assert_eq!(rim.kind, TraceKind::Rim);
        let c = cell.centroid;
        let across = |pts: &[Vec3]| {
            (0..3).map(|i| ((pts[i] + pts[(i + 1) % 6]) / 2.0 - (pts[i + 3] + pts[(i + 4) % 6]) / 2.0).norm()).sum::<f64>() / 3.0
        };
        let centerline = across(&rim.polyline);
        assert!((centerline - 3.45).abs() < 1e-6, "{centerline}");
        assert!((centerline + 0.25 - 3.7).abs() < 1e-6);
        for s in &traces[1..] {
            assert_eq!(s.kind, TraceKind::Spoke);
            assert!((s.polyline[0] - c).norm() < 1e-4);
        }
    }

    #[test]
    fn adjacent_rims_clear_by_gap() {
        let p2 = 4.5;
        let a = flat_hexagon(0, [0.0, 0.0], p2);
        let b = flat_hexagon(1, [p2, 0.0], p2);
        let surf = big_sphere();
        let ta = capacitive_cell_artwork(&a, &surf, LayerId::OuterCap, 0.25, 0.8).unwrap();
        let tb = capacitive_cell_artwork(&b, &surf, LayerId::OuterCap, 0.25, 0.8).unwrap();
        let gap = ta[0]
            .segments()
            .flat_map(|(p, q)| tb[0].segments().map(move |(r, s)| segment_segment_distance(&p, &q, &r, &s)))
            .fold(f64::INFINITY, f64::min)
            - 0.25;
        assert!((gap / 0.8 - 1.0).abs() < 0.05, "{gap}");
    }

    #[test]
    fn oversize_gap_is_infeasible() {
        let cell = flat_hexagon(3, [0.0, 0.0], 4.5);
        let err = capacitive_cell_artwork(&cell, &big_sphere(), LayerId::InnerCap, 0.25, 4.5).unwrap_err();
        assert!(matches!(err, Error::InfeasibleArtwork { cell: 3, .. }));
        assert!(matches!(capacitive_cell_artwork(&cell, &big_sphere(), LayerId::MidInd, 0.25, 0.8), Err(Error::Kind(_))));
        assert!(inductive_edge_artwork(Vec3::zeros(), Vec3::x(), -0.1, 0).is_err());
    }

    #[test]
    fn override_table_interpolates_and_clamps() {
        let t = OverrideTable::new(vec![
            OverrideRow { p2_mm: 4.0, g_mm: 0.6, w_l_mm: 0.2, w_c_mm: 0.25 },
            OverrideRow { p2_mm: 5.0, g_mm: 1.0, w_l_mm: 0.3, w_c_mm: 0.25 },
        ])
        .unwrap();
        assert!((t.lookup(4.5).g_mm - 0.8).abs() < 1e-12);
        assert_eq!(t.lookup(3.0).g_mm, 0.6);
        assert_eq!(t.lookup(9.0).w_l_mm, 0.3);
        let csv = "# comment\np2_mm,g_mm,w_l_mm,w_c_mm\n4.5, 0.8, 0.22, 0.25\n";
        assert_eq!(OverrideTable::from_csv_reader(csv.as_bytes()).unwrap(), OverrideTable::table_one());
        assert!(OverrideTable::from_csv_reader("p2_mm,g_mm\n4.5,0.8\n".as_bytes()).is_err());
        assert!(OverrideTable::new(vec![]).is_err());
    }

    #[test]
    fn pentagon_motifs() {
        let tess = small_dome(6, 0.0);
        let geom = PentagonGeom::default();
        let pents: Vec<&TessCell> = tess.cells.iter().filter(|c| c.kind == CellKind::Pentagon).collect();
        assert_eq!(pents.len(), 6);
        for layer in LayerId::ALL {
            for cell in &pents {
                let t = pentagon_artwork(cell, &tess.surface, layer, &geom).unwrap();
                let ring = &t[0];
                let side = (ring.polyline[0] - ring.polyline[1]).norm();
                let diag = (ring.polyline[0] - ring.polyline[2]).norm();
                match layer {
                    LayerId::MidInd => assert!((side - 1.51).abs() < 2e-3),
                    LayerId::OuterCap => assert!((diag - 2.22).abs() < 2e-3),
                    LayerId::InnerCap => assert!((diag - 2.13).abs() < 2e-3),
                }
            }
        }
        let hex = tess.hexagons().next().unwrap();
        assert!(matches!(pentagon_artwork(hex, &tess.surface, LayerId::OuterCap, &geom), Err(Error::Kind(_))));
    }

    #[test]
    fn layer_contents_and_grid() {
        let tess = small_dome(8, 0.0);
        let params = ArtworkParams::default();
        let ind = build_layer(&tess, LayerId::MidInd, &params).unwrap();
        let grid = ind.traces.iter().filter(|t| t.kind == TraceKind::Grid).count();
        assert_eq!(grid, tess.edges.len());
        assert_eq!(ind.traces.iter().filter(|t| t.kind == TraceKind::PentagonRing).count(), 6);
        assert_eq!(grid_components(&ind), 1);
        assert_eq!(ind.provenance.len(), tess.cells.len());
        let cap = build_layer(&tess, LayerId::OuterCap, &params).unwrap();
        assert!(cap.traces.iter().all(|t| t.kind != TraceKind::Grid));
        for t in cap.traces.iter().chain(&ind.traces) {
            for p in &t.polyline {
                assert!(tess.surface.distance(p) < 0.01);
            }
        }
    }

    #[test]
    fn edge_width_uses_mean_p2() {
        let (w, _) = ArtworkParams::default().wire_width((4.4 + 4.6) / 2.0).unwrap();
        assert!((w - wire_for_size(4.5).unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn drc_flags_thin_traces_and_passes_default() {
        let tess = small_dome(20, 0.0);
        let params = ArtworkParams::default();
        let art = build_layer(&tess, LayerId::OuterCap, &params).unwrap();
        let report = drc_check(&art, DEFAULT_MIN_WIDTH, DEFAULT_MIN_GAP);
        assert!(report.is_clean(), "{:?}", &report.violations[..report.violations.len().min(3)]);
        let thin = ArtworkParams { w_c: 0.1, ..ArtworkParams::default() };
        let art = build_layer(&tess, LayerId::OuterCap, &thin).unwrap();
        let report = drc_check(&art, DEFAULT_MIN_WIDTH, DEFAULT_MIN_GAP);
        let hex_traces = art.traces.iter().filter(|t| matches!(t.kind, TraceKind::Rim | TraceKind::Spoke)).count();
        assert_eq!(report.count(ViolationKind::Width), hex_traces);
        let empty = LayerArtwork { traces: vec![], ..art };
        assert!(drc_check(&empty, 0.15, 0.125).is_clean());
    }

    #[test]
    fn drc_catches_crossing_and_clearance() {
        let surf = big_sphere();
        let z = BIG;
        let mk = |pts: Vec<[f64; 2]>, cell_id: usize, closed: bool| TracePrimitive {
            kind: TraceKind::Rim,
            polyline: pts.iter().map(|q| Vec3::new(q[0], q[1], z)).collect(),
            closed,
            width: 0.2,
            layer_id: LayerId::OuterCap,
            cell_id,
        };
        let bowtie = mk(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], 0, true);
        let near = mk(vec![[5.0, 0.0], [5.0, 1.0]], 1, false);
        let nearer = mk(vec![[5.25, 0.0], [5.25, 1.0]], 2, false);
        let art = LayerArtwork {
            layer_id: LayerId::OuterCap,
            radius: BIG,
            surface: surf,
            traces: vec![bowtie, near, nearer],
            provenance: BTreeMap::new(),
        };
        let r = drc_check(&art, 0.15, 0.125);
        assert_eq!(r.count(ViolationKind::SelfIntersection), 1);
        assert_eq!(r.count(ViolationKind::Clearance), 1);
        assert_eq!(r.count(ViolationKind::Width), 0);
    }

    #[test]
    fn symmetric_artwork() {
        let tess = small_dome(6, 5.0);
        let params = ArtworkParams::default();
        for layer in LayerId::ALL {
            let art = build_layer(&tess, layer, &params).unwrap();
            assert!(layer_symmetry_defect(&art) < 1e-6, "{layer:?}");
            assert!(class_congruence_defect(&tess, &art) < 1e-6, "{layer:?}");
        }
    }

    #[test]
    fn exports_round_trip() {
        let tess = small_dome(4, 3.0);
        let layers: Vec<LayerArtwork> = LayerId::ALL.iter().map(|&l| build_layer(&tess, l, &ArtworkParams::table_one()).unwrap()).collect();
        let json = export_json(&layers).unwrap();
        let back = parse_json(&json).unwrap();
        assert_eq!(back.layers, layers);
        assert_eq!(export_json(&back.layers).unwrap(), json);
        assert!(parse_json(&json.replace(ARTWORK_SCHEMA, "other/9")).is_err());

        let svg = export_svg(&layers[2]);
        let strokes = svg.matches("<polyline").count() + svg.matches("<polygon").count();
        assert_eq!(strokes, layers[2].traces.len());

        let mesh = export_mesh(&layers[1]);
        let solids = parse_mesh(&mesh).unwrap();
        let segs: usize = layers[1].traces.iter().map(|t| t.segments().count()).sum();
        assert_eq!(solids.len(), segs);
        for s in solids.iter().take(200) {
            assert!(signed_volume(s) > 0.0);
        }
        assert!(matches!("dxf".parse::<ExportFormat>(), Err(Error::Usage(_))));
    }

    #[test]
    fn equi_impedance_across_law_range() {
        let (lo, hi) = crate::element::SCALING_LAW_P2_RANGE;
        let c = |p2: f64| patch_capacitance(p2, gap_for_size(p2).unwrap().value, 2.4).unwrap();
        for k in 0..=10 {
            let p = lo + (hi - lo) * k as f64 / 10.0;
            assert!((c(p) / c(4.5) - 1.0).abs() < 0.10);
        }
    }
}
