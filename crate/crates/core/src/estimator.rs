//! Thin-shell ray estimate of the dome's transmission: each feed-to-probe ray is
//! weighted by the unit-cell transmission at its local incidence angle where it crosses
//! the shell. No diffraction, edge scattering or curvature coupling.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{stack_response, stack_response_oblique, Polarization, StackSpec};
use crate::error::{Error, Result};
use crate::feed::{field_at, FeedSpec};
use crate::geom::Vec3;

pub const DEFAULT_R_PROBE_MM: f64 = 60.0;
pub const DEFAULT_R_SCAN_MM: f64 = 136.0;
/// Mid-layer radius, mm.
pub const DEFAULT_SHELL_RADIUS_MM: f64 = 73.75;
pub const DEFAULT_OUTER_RADIUS_MM: f64 = 75.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Boresight probe distance beyond the outer shell, mm.
    pub r_probe_mm: f64,
    /// Scan probe distance from the source, mm.
    pub r_scan_mm: f64,
    /// Probe angles, rad, measured in the feed's rotation plane.
    pub theta_probes: Vec<f64>,
    /// Feed rotation about +x, rad.
    pub theta_feed: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { r_probe_mm: DEFAULT_R_PROBE_MM, r_scan_mm: DEFAULT_R_SCAN_MM, theta_probes: vec![0.0], theta_feed: 0.0 }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_probe_mm > 0.0) || !(self.r_scan_mm > 0.0) {
            return Err(Error::Domain("probe distances must be positive".into()));
        }
        let ok = |a: f64| (0.0..=PI / 2.0 + 1e-12).contains(&a);
        if !ok(self.theta_feed) || !self.theta_probes.iter().all(|&a| ok(a)) {
            return Err(Error::Domain("probe and feed angles must lie in [0, 90] deg".into()));
        }
        Ok(())
    }
}

/// Hemispherical shell continued by a cylindrical skirt below z = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellModel {
    /// mm.
    pub center: Vec3,
    /// mm.
    pub radius: f64,
    /// mm.
    pub outer_radius: f64,
    /// mm.
    pub skirt_height: f64,
    pub stack: StackSpec,
}

impl ShellModel {
    pub fn reference() -> Self {
        Self {
            center: Vec3::zeros(),
            radius: DEFAULT_SHELL_RADIUS_MM,
            outer_radius: DEFAULT_OUTER_RADIUS_MM,
            skirt_height: 25.0,
            stack: StackSpec::reference_cell(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HitSurface {
    Sphere,
    Cylinder,
    /// The ray passes below the skirt.
    Miss,
}

/// Where a ray from `origin` along `dir` crosses the shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellHit {
    pub surface: HitSurface,
    pub point: Vec3,
    /// Outward unit normal.
    pub normal: Vec3,
    /// rad.
    pub incidence: f64,
}

fn first_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let (t1, t2) = ((-b - s) / (2.0 * a), (-b + s) / (2.0 * a));
    [t1, t2].into_iter().filter(|t| *t > 1e-12).reduce(f64::min)
}

/// Intersection of a ray (from inside the shell) with the sphere cap or the skirt.
pub fn intersect_shell(shell: &ShellModel, origin: &Vec3, dir: &Vec3) -> ShellHit {
    let d = dir.normalize();
    let o = origin - shell.center;
    let r = shell.radius;
    let miss = ShellHit { surface: HitSurface::Miss, point: *origin, normal: d, incidence: 0.0 };
    let incidence = |n: &Vec3| d.dot(n).abs().min(1.0).acos();
    if let Some(t) = first_positive_root(1.0, 2.0 * o.dot(&d), o.norm_squared() - r * r) {
        let p = o + d * t;
        if p.z >= 0.0 {
            let n = p / r;
            return ShellHit { surface: HitSurface::Sphere, point: p + shell.center, normal: n, incidence: incidence(&n) };
        }
    }
    let a = d.x * d.x + d.y * d.y;
    if let Some(t) = first_positive_root(a, 2.0 * (o.x * d.x + o.y * d.y), o.x * o.x + o.y * o.y - r * r) {
        let p = o + d * t;
        if p.z < 0.0 && p.z >= -shell.skirt_height {
            let n = Vec3::new(p.x, p.y, 0.0) / r;
            return ShellHit { surface: HitSurface::Cylinder, point: p + shell.center, normal: n, incidence: incidence(&n) };
        }
    }
    miss
}

/// Normal-incidence reference and per-angle TE/TM transmission of the shell's stack.
fn transmission(stack: &StackSpec, f: f64, theta: f64) -> Result<(Complex64, Complex64)> {
    if theta == 0.0 {
        let s = stack_response(stack, &[f])?.s21[0];
        return Ok((s, s));
    }
    let te = stack_response_oblique(stack, &[f], theta, Polarization::Te)?.s21[0];
    let tm = stack_response_oblique(stack, &[f], theta, Polarization::Tm)?.s21[0];
    Ok((te, tm))
}

fn vnorm(v: &Vector3<Complex64>) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Field with the shell in place: the TE and TM parts (relative to the plane of
/// incidence at the crossing point) are scaled by their transmission coefficients.
fn shelled_field(e: &Vector3<Complex64>, hit: &ShellHit, dir: &Vec3, te: Complex64, tm: Complex64) -> Vector3<Complex64> {
    let s_hat = hit.normal.cross(dir);
    if s_hat.norm() < 1e-12 {
        return e.map(|c| c * te);
    }
    let s_hat = s_hat.normalize();
    let s = s_hat.map(|x| Complex64::new(x, 0.0));
    let e_te_amp: Complex64 = e.iter().zip(s.iter()).map(|(a, b)| a * b).sum();
    let e_te = s.map(|c| c * e_te_amp);
    let e_tm = e - e_te;
    e_te.map(|c| c * te) + e_tm.map(|c| c * tm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub theta_probe: f64,
    pub freq_hz: f64,
    pub e_abs_with: f64,
    pub e_abs_without: f64,
    /// None where the feed radiates nothing toward the probe.
    pub norm_db: Option<f64>,
    pub surface: HitSurface,
    /// rad.
    pub incidence: f64,
    /// Part of the feed power can reach this probe without crossing the shell;
    /// reported, not modelled.
    pub direct_path: bool,
}

/// Probe position on the scan sphere, in the plane of the feed rotation.
pub fn probe_position(theta_probe: f64, r_mm: f64) -> Vec3 {
    Vec3::new(0.0, -theta_probe.sin(), theta_probe.cos()) * r_mm
}

fn sample(shell: &ShellModel, feed: &FeedSpec, origin: &Vec3, probe_mm: &Vec3, theta_probe: f64, f: f64) -> Result<ProbeSample> {
    let dir = (probe_mm - origin).normalize();
    let e = field_at(feed, f, &(origin * 1e-3), &(probe_mm * 1e-3))?;
    let without = vnorm(&e);
    let hit = intersect_shell(shell, origin, &dir);
    let (with, direct) = match hit.surface {
        HitSurface::Miss => (without, true),
        _ => {
            let (te, tm) = transmission(&shell.stack, f, hit.incidence)?;
            let grazing = (theta_probe - PI / 2.0).abs() < 1e-9;
            (vnorm(&shelled_field(&e, &hit, &dir, te, tm)), grazing)
        }
    };
    let norm_db = (without > 0.0).then(|| 20.0 * (with / without).log10());
    Ok(ProbeSample {
        theta_probe,
        freq_hz: f,
        e_abs_with: with,
        e_abs_without: without,
        norm_db,
        surface: hit.surface,
        incidence: hit.incidence,
        direct_path: direct,
    })
}

fn check_center_fed(shell: &ShellModel) -> Result<()> {
    if !(shell.radius > 0.0) || shell.outer_radius < shell.radius {
        return Err(Error::Geometry("shell radii must be positive with outer >= mid".into()));
    }
    Ok(())
}

/// Boresight transmission, dB, for a feed at `feed_origin` (mm). The feed must be
/// inside the shell.
pub fn boresight_transmission(shell: &ShellModel, feed: &FeedSpec, feed_origin: &Vec3, freqs: &[f64]) -> Result<Vec<f64>> {
    check_center_fed(shell)?;
    if (feed_origin - shell.center).norm() >= shell.radius {
        return Err(Error::Geometry("feed lies outside the shell".into()));
    }
    let probe = feed_origin + feed.pointing * (shell.outer_radius + DEFAULT_R_PROBE_MM);
    freqs.par_iter().map(|&f| sample(shell, feed, feed_origin, &probe, 0.0, f).map(|s| s.norm_db.unwrap_or(f64::NAN))).collect()
}

/// Field at each probe for a center-fed shell and a feed rotated by `theta_feed`.
pub fn scanned_field(shell: &ShellModel, feed_q: f64, probes: &ProbeConfig, f: f64) -> Result<Vec<ProbeSample>> {
    check_center_fed(shell)?;
    probes.validate()?;
    let feed = FeedSpec::rotated_about_x(feed_q, probes.theta_feed)?;
    probes
        .theta_probes
        .par_iter()
        .map(|&tp| sample(shell, &feed, &shell.center, &(probe_position(tp, probes.r_scan_mm) + shell.center), tp, f))
        .collect()
}

/// Per-probe frequency sweeps, probe-major.
pub fn scanned_sweep(shell: &ShellModel, feed_q: f64, probes: &ProbeConfig, freqs: &[f64]) -> Result<Vec<Vec<ProbeSample>>> {
    let per_freq: Vec<Vec<ProbeSample>> = freqs.par_iter().map(|&f| scanned_field(shell, feed_q, probes, f)).collect::<Result<_>>()?;
    Ok((0..probes.theta_probes.len()).map(|p| per_freq.iter().map(|row| row[p]).collect()).collect())
}
