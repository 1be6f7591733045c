//! Mapping between sheet circuit values and hexagonal unit-cell geometry.
//!
//! Lengths at the public surface are in millimeters unless a name says otherwise;
//! capacitance is in farads and inductance in henries.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{stack_response, SheetKind, StackSpec, FREE_SPACE_IMPEDANCE};
use crate::error::{Error, Result};

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Range of p2 over which the scaling laws were fitted, mm.
pub const SCALING_LAW_P2_RANGE: (f64, f64) = (3.22, 4.76);

const GAP_SLOPE: f64 = 0.3 / 0.8;
const GAP_OFFSET_MM: f64 = 0.88;
const WIRE_SLOPE: f64 = 0.2 / 0.85;
const WIRE_OFFSET_MM: f64 = 0.6;
/// Dimensions at or below this are treated as zero.
const MIN_FEATURE_MM: f64 = 1e-9;

/// Hexagonal unit-cell geometry, all fields in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCellGeom {
    /// Long (vertex-to-vertex) diagonal.
    pub p: f64,
    /// Short (across-flats) diagonal.
    pub p2: f64,
    pub w_l: f64,
    pub w_c: f64,
    pub g: f64,
    pub d_x: f64,
    pub d_y: f64,
    /// Edge length of the capacitive patch.
    pub patch_edge: f64,
    /// Edge length of the inductive-grid aperture.
    pub aperture_edge: f64,
}

impl UnitCellGeom {
    pub fn from_p2(p2: f64, g: f64, w_l: f64, w_c: f64) -> Result<Self> {
        let geom = Self {
            p: 2.0 * p2 / 3f64.sqrt(),
            p2,
            w_l,
            w_c,
            g,
            d_x: 3f64.sqrt() * p2,
            d_y: p2,
            patch_edge: (p2 - g) / 3f64.sqrt(),
            aperture_edge: (p2 - w_l) / 3f64.sqrt(),
        };
        geom.validate()?;
        Ok(geom)
    }

    /// The published cell: p2 = 4.5, g = 0.8, w_L = 0.22, w_C = 0.25.
    pub fn table_one() -> Self {
        Self::from_p2(4.5, 0.8, 0.22, 0.25).expect("table I geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.p, self.p2, self.w_l, self.w_c, self.g, self.d_x, self.d_y];
        if dims.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InfeasibleGeometry(format!("non-positive dimension in {self:?}")));
        }
        if self.g >= self.p2 || self.w_l >= self.p2 {
            return Err(Error::InfeasibleGeometry(format!("gap {} and wire width {} must be below p2 = {}", self.g, self.w_l, self.p2)));
        }
        if (self.p2 - 3f64.sqrt() / 2.0 * self.p).abs() > 1e-9 {
            return Err(Error::InfeasibleGeometry("p2 must equal (√3/2)·p".into()));
        }
        Ok(())
    }
}

/// Effective medium seen by an embedded sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub eps_eff: f64,
    pub mu_eff: f64,
}

impl Default for MediumParams {
    /// Sheet fully embedded in ABS.
    fn default() -> Self {
        Self { eps_eff: 2.4, mu_eff: 1.0 }
    }
}

fn log_cosecant_factor(period_mm: f64, feature_mm: f64, what: &str) -> Result<f64> {
    if !(period_mm > 0.0) || !(feature_mm > 0.0) {
        return Err(Error::Domain(format!("{what}: dimensions must be positive")));
    }
    if feature_mm > period_mm {
        return Err(Error::Domain(format!("{what}: {feature_mm} mm exceeds period {period_mm} mm")));
    }
    if feature_mm == period_mm {
        return Ok(0.0);
    }
    Ok((1.0 / (PI * feature_mm / (2.0 * period_mm)).sin()).ln())
}

/// Capacitance of a patch array with period `d_y` and gap `g` (both mm), farads.
pub fn patch_capacitance(d_y: f64, g: f64, eps_eff: f64) -> Result<f64> {
    if !(eps_eff >= 1.0) {
        return Err(Error::Domain(format!("eps_eff must be >= 1, got {eps_eff}")));
    }
    let k = log_cosecant_factor(d_y, g, "patch gap")?;
    Ok(EPS0 * eps_eff * (2.0 * d_y * 1e-3 / PI) * k)
}

/// Inductance of a wire grid with period `d_y` and wire width `w_l` (both mm), henries.
pub fn grid_inductance(d_y: f64, w_l: f64, mu_eff: f64) -> Result<f64> {
    if !(mu_eff > 0.0) {
        return Err(Error::Domain(format!("mu_eff must be positive, got {mu_eff}")));
    }
    let k = log_cosecant_factor(d_y, w_l, "wire width")?;
    Ok(MU0 * mu_eff * (d_y * 1e-3 / (2.0 * PI)) * k)
}

/// A scaled dimension and whether its input lay in the validated p2 range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledDimension {
    pub value: f64,
    pub in_validated_range: bool,
}

fn affine_law(p2: f64, slope: f64, offset: f64, what: &str) -> Result<ScaledDimension> {
    if !p2.is_finite() {
        return Err(Error::Domain(format!("p2 must be finite, got {p2}")));
    }
    let value = slope * p2 - offset;
    if value <= MIN_FEATURE_MM {
        return Err(Error::InfeasibleGeometry(format!("{what} law gives {value:.6} mm at p2 = {p2} mm")));
    }
    let (lo, hi) = SCALING_LAW_P2_RANGE;
    Ok(ScaledDimension { value, in_validated_range: (lo..=hi).contains(&p2) })
}

/// Capacitive-layer gap that keeps the sheet impedance fixed as the cell size varies.
pub fn gap_for_size(p2: f64) -> Result<ScaledDimension> {
    affine_law(p2, GAP_SLOPE, GAP_OFFSET_MM, "gap")
}

/// Inductive-layer wire width that keeps the sheet impedance fixed as the cell size varies.
pub fn wire_for_size(p2: f64) -> Result<ScaledDimension> {
    affine_law(p2, WIRE_SLOPE, WIRE_OFFSET_MM, "wire width")
}

/// Recovers C (farads) or L (henries) of a single shunt sheet from its transmission
/// coefficient in a homogeneous medium of impedance `z_medium`.
pub fn extract_sheet_value(s21: Complex64, f: f64, z_medium: f64, kind: SheetKind) -> Result<f64> {
    if !(f > 0.0) || !(z_medium > 0.0) {
        return Err(Error::Domain("frequency and medium impedance must be positive".into()));
    }
    let mag = s21.norm();
    if !(mag > 0.0) || mag > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("|S21| must lie in (0, 1], got {mag}")));
    }
    let y = (2.0 / s21 - 2.0) / z_medium;
    let omega = 2.0 * PI * f;
    if y.im == 0.0 {
        return Err(Error::DegenerateSheet("S21 = 1 gives zero admittance".into()));
    }
    match kind {
        SheetKind::Capacitive if y.im > 0.0 => Ok(y.im / omega),
        SheetKind::Inductive if y.im < 0.0 => Ok(-1.0 / (omega * y.im)),
        _ => Err(Error::Kind(format!("admittance {:+e} S has the wrong sign for a {kind:?} sheet", y.im))),
    }
}

/// Pass/stop specification for the synthesis sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTarget {
    pub pass_lo: f64,
    pub pass_hi: f64,
    /// Minimum in-band |S21|, dB.
    pub min_pass_db: f64,
    pub stop_freqs: Vec<f64>,
    /// Maximum |S21| at each stop frequency, dB.
    pub max_stop_db: f64,
    #[serde(default = "default_pass_samples")]
    pub pass_samples: usize,
}

fn default_pass_samples() -> usize {
    51
}

impl BandTarget {
    /// 7.5-12.5 GHz above -3 dB, at most -15 dB at 20 GHz.
    pub fn x_band() -> Self {
        Self {
            pass_lo: 7.5e9,
            pass_hi: 12.5e9,
            min_pass_db: -3.0,
            stop_freqs: vec![20e9],
            max_stop_db: -15.0,
            pass_samples: default_pass_samples(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pass_lo > 0.0) || !(self.pass_lo < self.pass_hi) {
            return Err(Error::Domain("pass band must satisfy 0 < f_lo < f_hi".into()));
        }
        if !self.min_pass_db.is_finite() || !self.max_stop_db.is_finite() {
            return Err(Error::Domain("dB bounds must be finite".into()));
        }
        if self.pass_samples < 2 || self.stop_freqs.iter().any(|f| !(*f > 0.0)) {
            return Err(Error::Domain("need >= 2 pass samples and positive stop frequencies".into()));
        }
        Ok(())
    }

    fn probe_grid(&self) -> Vec<f64> {
        let n = self.pass_samples;
        let step = (self.pass_hi - self.pass_lo) / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|i| self.pass_lo + i as f64 * step).collect();
        grid.extend(&self.stop_freqs);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

/// Dielectric layout into which swept (C, L) values are dropped. Thicknesses in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackTemplate {
    pub d1: f64,
    pub d2: f64,
    pub eps_r: f64,
    pub loss_tangent: f64,
    pub z0: f64,
}

impl Default for StackTemplate {
    fn default() -> Self {
        Self { d1: 1.25e-3, d2: 1.0e-3, eps_r: 2.4, loss_tangent: 0.0, z0: FREE_SPACE_IMPEDANCE }
    }
}

impl StackTemplate {
    pub fn build(&self, capacitance: f64, inductance: f64) -> Result<StackSpec> {
        let mut s = StackSpec::unit_cell(capacitance, inductance, self.d1, self.d2, self.eps_r, self.loss_tangent)?;
        s.z0 = self.z0;
        Ok(s)
    }
}

/// One swept axis: `steps` points from `min` to `max`, linear or geometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub log: bool,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0) || !(self.max >= self.min) || self.steps == 0 {
            return Err(Error::Domain(format!("invalid sweep axis {self:?}")));
        }
        if self.steps == 1 {
            return Ok(vec![self.min]);
        }
        let n = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| {
                let t = i as f64 / n;
                if self.log {
                    self.min * (self.max / self.min).powf(t)
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub c_farads: f64,
    pub l_henries: f64,
    /// Worst violation in dB (in-band deficit or stopband leakage); <= 0 when feasible.
    pub score_db: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// Best first.
    pub candidates: Vec<Candidate>,
    /// False when no candidate meets the target; the ranking is then best-effort.
    pub feasible: bool,
}

impl SynthesisResult {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }
}

/// Scores one (C, L) pair against the target.
pub fn score_candidate(target: &BandTarget, template: &StackTemplate, c: f64, l: f64) -> Result<Candidate> {
    target.validate()?;
    let grid = target.probe_grid();
    score_on_grid(target, template, &grid, c, l)
}

fn score_on_grid(target: &BandTarget, template: &StackTemplate, grid: &[f64], c: f64, l: f64) -> Result<Candidate> {
    let resp = stack_response(&template.build(c, l)?, grid)?;
    let db = resp.s21_db();
    let (mut worst_pass, mut worst_stop) = (f64::INFINITY, f64::NEG_INFINITY);
    for (f, v) in grid.iter().zip(&db) {
        if (target.pass_lo..=target.pass_hi).contains(f) {
            worst_pass = worst_pass.min(*v);
        }
        if target.stop_freqs.contains(f) {
            worst_stop = worst_stop.max(*v);
        }
    }
    let deficit = target.min_pass_db - worst_pass;
    let leakage = worst_stop - target.max_stop_db;
    let score_db = deficit.max(leakage);
    Ok(Candidate { c_farads: c, l_henries: l, score_db, feasible: score_db <= 0.0 })
}

/// Exhaustive (C, L) grid sweep ranked best-first by worst-case dB violation,
/// ties broken by C then L ascending.
pub fn synthesize_lc(target: &BandTarget, template: &StackTemplate, c_axis: &SweepAxis, l_axis: &SweepAxis) -> Result<SynthesisResult> {
    target.validate()?;
    let cs = c_axis.values()?;
    let ls = l_axis.values()?;
    let grid = target.probe_grid();
    let pairs: Vec<(f64, f64)> = cs.iter().flat_map(|&c| ls.iter().map(move |&l| (c, l))).collect();
    let mut candidates = pairs.par_iter().map(|&(c, l)| score_on_grid(target, template, &grid, c, l)).collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| {
        a.score_db.total_cmp(&b.score_db).then(a.c_farads.total_cmp(&b.c_farads)).then(a.l_henries.total_cmp(&b.l_henries))
    });
    let feasible = candidates.first().is_some_and(|c| c.feasible);
    Ok(SynthesisResult { candidates, feasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{abcd_to_sparams, shunt_sheet_abcd, SheetElement};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn table_one_capacitance() {
        let c = patch_capacitance(4.5, 0.8, 2.4).unwrap();
        assert_relative_eq!(c, 78.4e-15, max_relative = 1e-3);
        assert!((c - 78e-15).abs() / 78e-15 < 0.01);
    }

    #[test]
    fn table_one_inductance_is_not_the_design_value() {
        let l = grid_inductance(4.5, 0.22, 1.0).unwrap();
        assert_relative_eq!(l, 2.31e-9, max_relative = 2e-3);
        assert!((l - 1.66e-9).abs() / 1.66e-9 > 0.3);
    }

    #[test]
    fn full_period_feature_gives_zero() {
        assert_eq!(patch_capacitance(4.5, 4.5, 2.4).unwrap(), 0.0);
        assert_eq!(grid_inductance(4.5, 4.5, 1.0).unwrap(), 0.0);
        assert!(matches!(patch_capacitance(4.5, 5.0, 2.4), Err(Error::Domain(_))));
        assert!(matches!(grid_inductance(4.5, 4.6, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn halving_feature_increases_reactance() {
        assert!(patch_capacitance(4.5, 0.4, 2.4).unwrap() > patch_capacitance(4.5, 0.8, 2.4).unwrap());
        assert!(grid_inductance(4.5, 0.11, 1.0).unwrap() > grid_inductance(4.5, 0.22, 1.0).unwrap());
    }

    #[test]
    fn gap_law_values() {
        assert_relative_eq!(gap_for_size(4.5).unwrap().value, 0.8075, max_relative = 1e-12);
        assert_relative_eq!(gap_for_size(3.22).unwrap().value, 0.3275, max_relative = 1e-12);
        assert!(matches!(gap_for_size(2.0), Err(Error::InfeasibleGeometry(_))));
        assert!(!gap_for_size(5.5).unwrap().in_validated_range);
        assert!(gap_for_size(4.0).unwrap().in_validated_range);
    }

    #[test]
    fn wire_law_values() {
        assert_relative_eq!(wire_for_size(4.5).unwrap().value, 0.458_823_529, max_relative = 1e-8);
        assert_relative_eq!(wire_for_size(3.22).unwrap().value, 0.157_647_058, max_relative = 1e-8);
        assert!(matches!(wire_for_size(2.55), Err(Error::InfeasibleGeometry(_))));
    }

    #[test]
    fn laws_are_affine() {
        let h = 0.25;
        let gs = (gap_for_size(4.0 + h).unwrap().value - gap_for_size(4.0).unwrap().value) / h;
        let ws = (wire_for_size(4.0 + h).unwrap().value - wire_for_size(4.0).unwrap().value) / h;
        assert_relative_eq!(gs, 0.3 / 0.8, max_relative = 1e-12);
        assert_relative_eq!(ws, 0.2 / 0.85, max_relative = 1e-12);
    }

    #[test]
    fn geometry_relations() {
        let g = UnitCellGeom::table_one();
        assert_relative_eq!(g.p, 5.196, max_relative = 1e-3);
        assert!((g.p - 5.19).abs() / 5.19 < 2e-3);
        assert!(UnitCellGeom::from_p2(4.5, 4.6, 0.2, 0.25).is_err());
        assert!(UnitCellGeom::from_p2(4.5, 0.8, -0.2, 0.25).is_err());
    }

    fn embedded_s21(kind: SheetKind, value: f64, f: f64) -> (Complex64, f64) {
        let z = FREE_SPACE_IMPEDANCE / 2.4f64.sqrt();
        let t = shunt_sheet_abcd(&SheetElement::new(kind, value).unwrap(), f).unwrap();
        (abcd_to_sparams(&t, z).unwrap().1, z)
    }

    #[test]
    fn extraction_round_trip() {
        let (s21, z) = embedded_s21(SheetKind::Capacitive, 78e-15, 10e9);
        let c = extract_sheet_value(s21, 10e9, z, SheetKind::Capacitive).unwrap();
        assert_relative_eq!(c, 78e-15, max_relative = 1e-6);
        let (s21, z) = embedded_s21(SheetKind::Inductive, 1.66e-9, 10e9);
        let l = extract_sheet_value(s21, 10e9, z, SheetKind::Inductive).unwrap();
        assert_relative_eq!(l, 1.66e-9, max_relative = 1e-6);
    }

    #[test]
    fn extraction_errors() {
        let z = 243.0;
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(extract_sheet_value(one, 1e9, z, SheetKind::Capacitive), Err(Error::DegenerateSheet(_))));
        let (s21, _) = embedded_s21(SheetKind::Capacitive, 78e-15, 10e9);
        assert!(matches!(extract_sheet_value(s21, 10e9, z, SheetKind::Inductive), Err(Error::Kind(_))));
    }

    proptest! {
        #[test]
        fn extraction_inverts_sheet(f_ghz in 2.0f64..30.0, c_ff in 10.0f64..200.0, l_nh in 0.3f64..15.0) {
            let f = f_ghz * 1e9;
            let (s21, z) = embedded_s21(SheetKind::Capacitive, c_ff * 1e-15, f);
            let c = extract_sheet_value(s21, f, z, SheetKind::Capacitive).unwrap();
            prop_assert!((c / (c_ff * 1e-15) - 1.0).abs() < 1e-6);
            let (s21, z) = embedded_s21(SheetKind::Inductive, l_nh * 1e-9, f);
            let l = extract_sheet_value(s21, f, z, SheetKind::Inductive).unwrap();
            prop_assert!((l / (l_nh * 1e-9) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn reactance_formulas_decrease(d in 2.0f64..6.0, a in 0.01f64..0.98, b in 0.01f64..0.98) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a * d, b * d) } else { (b * d, a * d) };
            prop_assert!(patch_capacitance(d, lo, 2.4).unwrap() > patch_capacitance(d, hi, 2.4).unwrap());
            prop_assert!(grid_inductance(d, lo, 1.0).unwrap() > grid_inductance(d, hi, 1.0).unwrap());
        }
    }

    #[test]
    fn single_point_sweep() {
        let axis_c = SweepAxis { min: 78e-15, max: 78e-15, steps: 1, log: false };
        let axis_l = SweepAxis { min: 1.66e-9, max: 1.66e-9, steps: 1, log: false };
        let r = synthesize_lc(&BandTarget::x_band(), &StackTemplate::default(), &axis_c, &axis_l).unwrap();
        assert_eq!(r.candidates.len(), 1);
        let direct = score_candidate(&BandTarget::x_band(), &StackTemplate::default(), 78e-15, 1.66e-9).unwrap();
        assert_eq!(r.candidates[0], direct);
        assert!(direct.feasible);
    }

    #[test]
    fn contradictory_target_is_infeasible() {
        let target = BandTarget { stop_freqs: vec![10e9], ..BandTarget::x_band() };
        let c = SweepAxis { min: 40e-15, max: 120e-15, steps: 5, log: false };
        let l = SweepAxis { min: 0.5e-9, max: 12e-9, steps: 5, log: true };
        let r = synthesize_lc(&target, &StackTemplate::default(), &c, &l).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.candidates.len(), 25);
        assert!(r.candidates.iter().all(|c| !c.feasible));
    }

    #[test]
    fn ranking_is_sorted_and_tie_broken() {
        let c = SweepAxis { min: 60e-15, max: 100e-15, steps: 5, log: false };
        let l = SweepAxis { min: 1e-9, max: 3e-9, steps: 5, log: false };
        let r = synthesize_lc(&BandTarget::x_band(), &StackTemplate::default(), &c, &l).unwrap();
        for w in r.candidates.windows(2) {
            let ord = w[0].score_db.total_cmp(&w[1].score_db).then(w[0].c_farads.total_cmp(&w[1].c_farads));
            assert!(ord.is_le());
        }
    }

    #[test]
    fn bad_axes_rejected() {
        assert!(SweepAxis { min: 0.0, max: 1.0, steps: 3, log: false }.values().is_err());
        assert!(SweepAxis { min: 1.0, max: 2.0, steps: 0, log: false }.values().is_err());
        let t = BandTarget { pass_lo: 10e9, pass_hi: 5e9, ..BandTarget::x_band() };
        assert!(t.validate().is_err());
    }
}
