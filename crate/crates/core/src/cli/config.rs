//! Project configuration: one TOML file with a section per module. Units are fixed:
//! frequencies in Hz, circuit values in F and H, dielectric thicknesses in m, all
//! geometry in mm, angles in degrees.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::artwork::{ArtworkParams, OverrideTable, PentagonGeom, DEFAULT_MIN_GAP, DEFAULT_MIN_WIDTH, DEFAULT_W_C};
use crate::circuit::{linear_grid, Polarization, StackSpec, FREE_SPACE_IMPEDANCE};
use crate::element::{BandTarget, StackTemplate, SweepAxis};
use crate::error::{Error, Result};
use crate::estimator::{ProbeConfig, ShellModel};
use crate::goldberg::{DEFAULT_FREQUENCY, DEFAULT_LAYER_RADII, DEFAULT_SKIRT_HEIGHT};
use crate::postproc::{GateCenter, GateShape, GaussianSpec, DEFAULT_GATE_NS, DEFAULT_W0_MM};

pub const RUN_SCHEMA: &str = "fssdome.run/1";
/// Value of `override_table` selecting the built-in single-row table.
pub const TABLE_ONE: &str = "table-one";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub output_dir: PathBuf,
    pub stack: StackConfig,
    pub sweep: SweepConfig,
    pub synth: SynthConfig,
    pub tessellation: TessellationConfig,
    pub artwork: ArtworkConfig,
    pub feed: FeedConfig,
    pub postproc: PostprocConfig,
    pub estimator: EstimatorConfig,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            stack: StackConfig::default(),
            sweep: SweepConfig::default(),
            synth: SynthConfig::default(),
            tessellation: TessellationConfig::default(),
            artwork: ArtworkConfig::default(),
            feed: FeedConfig::default(),
            postproc: PostprocConfig::default(),
            estimator: EstimatorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackConfig {
    pub capacitance_f: f64,
    pub inductance_h: f64,
    pub d1_m: f64,
    pub d2_m: f64,
    pub eps_r: f64,
    pub loss_tangent: f64,
    pub z0_ohm: f64,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            capacitance_f: 78e-15,
            inductance_h: 1.66e-9,
            d1_m: 1.25e-3,
            d2_m: 1.0e-3,
            eps_r: 2.4,
            loss_tangent: 0.0,
            z0_ohm: FREE_SPACE_IMPEDANCE,
        }
    }
}

impl StackConfig {
    pub fn template(&self) -> StackTemplate {
        StackTemplate { d1: self.d1_m, d2: self.d2_m, eps_r: self.eps_r, loss_tangent: self.loss_tangent, z0: self.z0_ohm }
    }

    pub fn build(&self) -> Result<StackSpec> {
        self.template().build(self.capacitance_f, self.inductance_h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolChoice {
    Te,
    Tm,
    Both,
}

impl PolChoice {
    pub fn polarizations(self) -> Vec<Polarization> {
        match self {
            Self::Te => vec![Polarization::Te],
            Self::Tm => vec![Polarization::Tm],
            Self::Both => vec![Polarization::Te, Polarization::Tm],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    pub freq_step_hz: f64,
    /// Oblique incidence angle for an extra response sweep.
    pub theta_deg: Option<f64>,
    pub pol: PolChoice,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { freq_min_hz: 1e9, freq_max_hz: 30e9, freq_step_hz: 10e6, theta_deg: None, pol: PolChoice::Both }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        linear_grid(self.freq_min_hz, self.freq_max_hz, self.freq_step_hz).map_err(|e| Error::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub target: BandTarget,
    /// Farads.
    pub c_axis: SweepAxis,
    /// Henries.
    pub l_axis: SweepAxis,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            target: BandTarget::x_band(),
            c_axis: SweepAxis { min: 20e-15, max: 200e-15, steps: 91, log: false },
            l_axis: SweepAxis { min: 0.2e-9, max: 4.0e-9, steps: 191, log: false },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TessellationConfig {
    pub m: u32,
    pub layer_radii_mm: Vec<f64>,
    pub skirt_height_mm: f64,
}

impl Default for TessellationConfig {
    fn default() -> Self {
        Self { m: DEFAULT_FREQUENCY, layer_radii_mm: DEFAULT_LAYER_RADII.to_vec(), skirt_height_mm: DEFAULT_SKIRT_HEIGHT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArtworkConfig {
    /// CSV path, or `table-one`; unset means the scaling laws.
    pub override_table: Option<String>,
    pub w_c_mm: f64,
    pub pentagon: PentagonGeom,
    pub min_width_mm: f64,
    pub min_gap_mm: f64,
    /// json, svg or mesh.
    pub format: String,
}

impl Default for ArtworkConfig {
    fn default() -> Self {
        Self {
            override_table: None,
            w_c_mm: DEFAULT_W_C,
            pentagon: PentagonGeom::default(),
            min_width_mm: DEFAULT_MIN_WIDTH,
            min_gap_mm: DEFAULT_MIN_GAP,
            format: "json".into(),
        }
    }
}

impl ArtworkConfig {
    pub fn params(&self) -> Result<ArtworkParams> {
        let overrides = match self.override_table.as_deref() {
            None => None,
            Some(TABLE_ONE) => Some(OverrideTable::table_one()),
            Some(path) => Some(OverrideTable::from_csv_path(Path::new(path)).map_err(|e| input_error(path, e))?),
        };
        Ok(ArtworkParams { w_c: self.w_c_mm, overrides, pentagon: self.pentagon })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeedConfig {
    pub q: f64,
    pub horn_csv: Option<PathBuf>,
    /// Use the beamwidth relation exactly as printed.
    pub literal_a9: bool,
}

impl Default for FeedConfig {
    fn default() -> Self {
        Self { q: 2.0, horn_csv: None, literal_a9: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PostprocConfig {
    pub w0_mm: f64,
    pub spacing_wavelengths: f64,
    pub half_extent_mm: Option<f64>,
    pub gate_ns: f64,
    pub gate_shape: GateShape,
    /// Unset means the impulse-response peak.
    pub gate_center_ns: Option<f64>,
}

impl Default for PostprocConfig {
    fn default() -> Self {
        Self {
            w0_mm: DEFAULT_W0_MM,
            spacing_wavelengths: 0.125,
            half_extent_mm: None,
            gate_ns: DEFAULT_GATE_NS,
            gate_shape: GateShape::Hann,
            gate_center_ns: None,
        }
    }
}

impl PostprocConfig {
    pub fn gaussian(&self) -> GaussianSpec {
        GaussianSpec { w0_mm: self.w0_mm, spacing_wavelengths: self.spacing_wavelengths, half_extent_mm: self.half_extent_mm }
    }

    pub fn gate_center(&self) -> GateCenter {
        self.gate_center_ns.map_or(GateCenter::Auto, GateCenter::Explicit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub shell_radius_mm: f64,
    pub outer_radius_mm: f64,
    pub skirt_height_mm: f64,
    pub r_probe_mm: f64,
    pub r_scan_mm: f64,
    pub theta_probes_deg: Vec<f64>,
    pub theta_feed_deg: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        let shell = ShellModel::reference();
        let probes = ProbeConfig::default();
        Self {
            shell_radius_mm: shell.radius,
            outer_radius_mm: shell.outer_radius,
            skirt_height_mm: shell.skirt_height,
            r_probe_mm: probes.r_probe_mm,
            r_scan_mm: probes.r_scan_mm,
            theta_probes_deg: vec![0.0, 30.0, 60.0, 90.0],
            theta_feed_deg: 0.0,
        }
    }
}

impl EstimatorConfig {
    pub fn shell(&self, stack: StackSpec) -> ShellModel {
        ShellModel {
            center: crate::geom::Vec3::zeros(),
            radius: self.shell_radius_mm,
            outer_radius: self.outer_radius_mm,
            skirt_height: self.skirt_height_mm,
            stack,
        }
    }

    pub fn probes(&self) -> ProbeConfig {
        ProbeConfig {
            r_probe_mm: self.r_probe_mm,
            r_scan_mm: self.r_scan_mm,
            theta_probes: self.theta_probes_deg.iter().map(|d| d.to_radians()).collect(),
            theta_feed: self.theta_feed_deg.to_radians(),
        }
    }
}

/// Errors reading a user-supplied file: a missing file is a usage error, a bad one a
/// data-format error.
pub(crate) fn input_error(path: &str, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Usage(format!("cannot read {path}: {io}")),
        Error::DataFormat(m) => Error::DataFormat(format!("{path}: {m}")),
        other => other,
    }
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64, unit: &str) -> Result<()> {
    if v.is_finite() && v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::Usage(format!("{name} = {v} is outside [{lo:e}, {hi:e}] {unit}; check the units")))
    }
}

impl ProjectConfig {
    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::DataFormat(format!("{}: {e}", path.display())))?;
        cfg.rebase(path.parent().unwrap_or(Path::new("")));
        Ok(cfg)
    }

    /// Resolves relative input paths against the config file's directory.
    fn rebase(&mut self, dir: &Path) {
        if let Some(p) = &self.feed.horn_csv {
            if p.is_relative() {
                self.feed.horn_csv = Some(dir.join(p));
            }
        }
        if let Some(t) = &self.artwork.override_table {
            if t != TABLE_ONE && Path::new(t).is_relative() {
                self.artwork.override_table = Some(dir.join(t).to_string_lossy().into_owned());
            }
        }
    }

    /// Magnitude checks that catch unit slips (fF typed as F, mm as m).
    pub fn validate(&self) -> Result<()> {
        let s = &self.stack;
        in_range("stack.capacitance_f", s.capacitance_f, 1e-18, 1e-9, "F")?;
        in_range("stack.inductance_h", s.inductance_h, 1e-13, 1e-5, "H")?;
        in_range("stack.d1_m", s.d1_m, 0.0, 0.1, "m")?;
        in_range("stack.d2_m", s.d2_m, 0.0, 0.1, "m")?;
        in_range("stack.eps_r", s.eps_r, 1.0, 100.0, "")?;
        in_range("stack.loss_tangent", s.loss_tangent, 0.0, 1.0, "")?;
        in_range("stack.z0_ohm", s.z0_ohm, 1.0, 1e4, "ohm")?;
        let w = &self.sweep;
        in_range("sweep.freq_min_hz", w.freq_min_hz, 1e6, 1e13, "Hz")?;
        in_range("sweep.freq_max_hz", w.freq_max_hz, 1e6, 1e13, "Hz")?;
        in_range("sweep.freq_step_hz", w.freq_step_hz, 1.0, 1e13, "Hz")?;
        if let Some(t) = w.theta_deg {
            in_range("sweep.theta_deg", t, 0.0, 89.999, "deg")?;
        }
        let t = &self.tessellation;
        for r in &t.layer_radii_mm {
            in_range("tessellation.layer_radii_mm", *r, 1.0, 1e5, "mm")?;
        }
        in_range("tessellation.skirt_height_mm", t.skirt_height_mm, 0.0, 1e5, "mm")?;
        let a = &self.artwork;
        in_range("artwork.w_c_mm", a.w_c_mm, 1e-3, 100.0, "mm")?;
        in_range("artwork.min_width_mm", a.min_width_mm, 0.0, 100.0, "mm")?;
        in_range("artwork.min_gap_mm", a.min_gap_mm, 0.0, 100.0, "mm")?;
        in_range("feed.q", self.feed.q, 0.0, 1e3, "")?;
        let p = &self.postproc;
        in_range("postproc.w0_mm", p.w0_mm, 1e-3, 1e5, "mm")?;
        in_range("postproc.spacing_wavelengths", p.spacing_wavelengths, 1e-4, 0.25, "wavelengths")?;
        in_range("postproc.gate_ns", p.gate_ns, 1e-6, 1e6, "ns")?;
        let e = &self.estimator;
        in_range("estimator.shell_radius_mm", e.shell_radius_mm, 1.0, 1e5, "mm")?;
        in_range("estimator.outer_radius_mm", e.outer_radius_mm, e.shell_radius_mm, 1e5, "mm")?;
        in_range("estimator.skirt_height_mm", e.skirt_height_mm, 0.0, 1e5, "mm")?;
        in_range("estimator.r_probe_mm", e.r_probe_mm, 1e-3, 1e6, "mm")?;
        in_range("estimator.r_scan_mm", e.r_scan_mm, 1e-3, 1e6, "mm")?;
        in_range("estimator.theta_feed_deg", e.theta_feed_deg, 0.0, 90.0, "deg")?;
        for d in &e.theta_probes_deg {
            in_range("estimator.theta_probes_deg", *d, 0.0, 90.0, "deg")?;
        }
        Ok(())
    }
}
