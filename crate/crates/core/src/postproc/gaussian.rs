//! Gaussian receive-beam synthesis from a far-field scan.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Beam waist used by default, mm.
pub const DEFAULT_W0_MM: f64 = 69.0;
/// Sample-holder radius, mm.
pub const DEFAULT_SAMPLE_RADIUS_MM: f64 = 75.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub w0_mm: f64,
    /// Grid step in wavelengths.
    pub spacing_wavelengths: f64,
    /// Optional cap on the aperture half-extent, mm.
    pub half_extent_mm: Option<f64>,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self { w0_mm: DEFAULT_W0_MM, spacing_wavelengths: 0.125, half_extent_mm: None }
    }
}

/// Real aperture samples on a square grid centered at the origin; `values` is x-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApertureGrid {
    pub xs_mm: Vec<f64>,
    pub ys_mm: Vec<f64>,
    pub values: Vec<f64>,
    pub spacing_mm: f64,
}

impl ApertureGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ys_mm.len() + iy]
    }

    /// Samples of an arbitrary aperture function on a centered square grid.
    pub fn sample(half_extent_mm: f64, spacing_mm: f64, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !(spacing_mm > 0.0) || !(half_extent_mm >= 0.0) {
            return Err(Error::Domain("aperture grid needs a positive spacing".into()));
        }
        let n = (half_extent_mm / spacing_mm).ceil() as i64;
        let axis: Vec<f64> = (-n..=n).map(|i| i as f64 * spacing_mm).collect();
        let values = axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).map(|(x, y)| g(x, y)).collect();
        Ok(Self { xs_mm: axis.clone(), ys_mm: axis, values, spacing_mm })
    }
}

pub fn wavelength_mm(f: f64) -> f64 {
    SPEED_OF_LIGHT / f * 1e3
}

/// Samples `g(x, y) = exp(-(x² + y²)/w0²)` on a grid of the configured fraction of a
/// wavelength, out to 3·w0 or the configured half-extent, whichever is smaller.
pub fn gaussian_aperture(spec: &GaussianSpec, f: f64) -> Result<ApertureGrid> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    if !(spec.w0_mm > 0.0) {
        return Err(Error::Domain(format!("beam waist must be positive, got {}", spec.w0_mm)));
    }
    if !(spec.spacing_wavelengths > 0.0) || spec.spacing_wavelengths > 0.25 {
        return Err(Error::Sampling(format!("grid step {} wavelengths exceeds a quarter wavelength", spec.spacing_wavelengths)));
    }
    let half = match spec.half_extent_mm {
        Some(h) => h.min(3.0 * spec.w0_mm),
        None => 3.0 * spec.w0_mm,
    };
    let w2 = spec.w0_mm * spec.w0_mm;
    ApertureGrid::sample(half, spec.spacing_wavelengths * wavelength_mm(f), |x, y| (-(x * x + y * y) / w2).exp())
}

/// Complex samples on a (frequency, θ, φ) grid; `values` is frequency-major, then θ,
/// then φ. Angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldGrid {
    pub freqs: Vec<f64>,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub values: Vec<Complex64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl FarFieldGrid {
    pub fn new(freqs: Vec<f64>, thetas: Vec<f64>, phis: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if freqs.is_empty() || thetas.is_empty() || phis.is_empty() {
            return Err(Error::Usage("far-field grid is empty".into()));
        }
        if !strictly_increasing(&freqs) || !strictly_increasing(&thetas) || !strictly_increasing(&phis) {
            return Err(Error::DataFormat("far-field axes must be strictly increasing".into()));
        }
        if values.len() != freqs.len() * thetas.len() * phis.len() {
            return Err(Error::DataFormat(format!(
                "far-field grid has {} values for {}x{}x{} samples",
                values.len(),
                freqs.len(),
                thetas.len(),
                phis.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::DataFormat("far-field values must be finite".into()));
        }
        Ok(Self { freqs, thetas, phis, values })
    }

    pub fn index(&self, fi: usize, ti: usize, pi: usize) -> usize {
        (fi * self.thetas.len() + ti) * self.phis.len() + pi
    }

    pub fn at(&self, fi: usize, ti: usize, pi: usize) -> Complex64 {
        self.values[self.index(fi, ti, pi)]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.freqs == other.freqs && self.thetas == other.thetas && self.phis == other.phis
    }

    /// Dense CSV `freq_hz,theta_deg,phi_deg,re_s21,im_s21`, rows ordered by
    /// frequency, then θ, then φ. `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            freq_hz: f64,
            theta_deg: f64,
            phi_deg: f64,
            re_s21: f64,
            im_s21: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let rows: Vec<Row> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        let axis = |get: &dyn Fn(&Row) -> f64| -> Vec<f64> {
            let mut v: Vec<f64> = rows.iter().map(get).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let freqs = axis(&|r| r.freq_hz);
        let thetas_deg = axis(&|r| r.theta_deg);
        let phis_deg = axis(&|r| r.phi_deg);
        let (nt, np) = (thetas_deg.len(), phis_deg.len());
        if rows.len() != freqs.len() * nt * np {
            return Err(Error::DataFormat(format!("far-field CSV has {} rows, not a dense grid", rows.len())));
        }
        for (i, r) in rows.iter().enumerate() {
            let (fi, ti, pi) = (i / (nt * np), (i / np) % nt, i % np);
            if r.freq_hz != freqs[fi] || r.theta_deg != thetas_deg[ti] || r.phi_deg != phis_deg[pi] {
                return Err(Error::DataFormat(format!("far-field CSV row {} is out of grid order", i + 1)));
            }
        }
        Self::new(
            freqs,
            thetas_deg.iter().map(|d| d.to_radians()).collect(),
            phis_deg.iter().map(|d| d.to_radians()).collect(),
            rows.iter().map(|r| Complex64::new(r.re_s21, r.im_s21)).collect(),
        )
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

/// `Σ_x Σ_y g(x, y) exp(+j k sinθ (x cosφ + y sinφ))` at each direction, θ-major.
pub fn backproject_farfield(aperture: &ApertureGrid, thetas: &[f64], phis: &[f64], f: f64) -> Result<Vec<Complex64>> {
    if aperture.values.is_empty() || thetas.is_empty() || phis.is_empty() {
        return Err(Error::Usage("back-projection needs a non-empty aperture and angle grid".into()));
    }
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    let k = 2.0 * PI / wavelength_mm(f);
    let ny = aperture.ys_mm.len();
    let dirs: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| phis.iter().map(move |&p| (t, p))).collect();
    Ok(dirs
        .par_iter()
        .map(|&(theta, phi)| {
            let ux = k * theta.sin() * phi.cos();
            let uy = k * theta.sin() * phi.sin();
            let ey: Vec<Complex64> = aperture.ys_mm.iter().map(|&y| Complex64::from_polar(1.0, uy * y)).collect();
            aperture
                .xs_mm
                .iter()
                .enumerate()
                .map(|(ix, &x)| {
                    let row = &aperture.values[ix * ny..(ix + 1) * ny];
                    let inner: Complex64 = row.iter().zip(&ey).map(|(g, e)| e * *g).sum();
                    inner * Complex64::from_polar(1.0, ux * x)
                })
                .sum()
        })
        .collect())
}

/// Back-projected Gaussian on the measurement grid, one pattern per frequency.
pub fn gaussian_farfield(spec: &GaussianSpec, grid: &FarFieldGrid) -> Result<FarFieldGrid> {
    let mut values = Vec::with_capacity(grid.values.len());
    for &f in &grid.freqs {
        let ap = gaussian_aperture(spec, f)?;
        values.extend(backproject_farfield(&ap, &grid.thetas, &grid.phis, f)?);
    }
    FarFieldGrid::new(grid.freqs.clone(), grid.thetas.clone(), grid.phis.clone(), values)
}

/// `Σ_θ Σ_φ S21(θ, φ) FF_G(θ, φ) sinθ` per frequency.
pub fn gaussian_weighting(meas: &FarFieldGrid, ffg: &FarFieldGrid) -> Result<Vec<Complex64>> {
    if !meas.same_grid(ffg) {
        return Err(Error::Usage("measured and Gaussian far fields are on different grids".into()));
    }
    let sin: Vec<f64> = meas.thetas.iter().map(|t| t.sin()).collect();
    Ok((0..meas.freqs.len())
        .map(|fi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ti, s) in sin.iter().enumerate() {
                for pi in 0..meas.phis.len() {
                    let idx = meas.index(fi, ti, pi);
                    acc += meas.values[idx] * ffg.values[idx] * *s;
                }
            }
            acc
        })
        .collect())
}

/// `20 log10(|with| / |without|)`; `None` where the calibration is zero.
pub fn normalize_calibration(with_sample: &[Complex64], without_sample: &[Complex64]) -> Result<Vec<Option<f64>>> {
    if with_sample.len() != without_sample.len() {
        return Err(Error::Alignment(format!("calibration has {} samples, measurement {}", without_sample.len(), with_sample.len())));
    }
    Ok(with_sample.iter().zip(without_sample).map(|(w, c)| (c.norm() > 0.0).then(|| 20.0 * (w.norm() / c.norm()).log10())).collect())
}

/// Waist whose |g|² puts `fraction` of the power inside radius `a`.
pub fn waist_for_containment(a_mm: f64, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain(format!("fraction must lie in (0, 1), got {fraction}")));
    }
    if !(a_mm > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {a_mm}")));
    }
    Ok(a_mm * (-2.0 / (1.0 - fraction).ln()).sqrt())
}

pub fn contained_fraction(a_mm: f64, w0_mm: f64) -> f64 {
    1.0 - (-2.0 * (a_mm / w0_mm).powi(2)).exp()
}
