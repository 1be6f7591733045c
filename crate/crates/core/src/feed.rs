//! Raised-cosine feed pattern and the fit of its exponent to horn datasheet curves.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::geom::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedSpec {
    pub q: f64,
    /// Field amplitude scale, V.
    pub e0: f64,
    /// Boresight direction (unit).
    pub pointing: Vec3,
}

impl FeedSpec {
    pub fn new(q: f64, e0: f64, pointing: Vec3) -> Result<Self> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("q must be >= 0, got {q}")));
        }
        let n = pointing.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("feed pointing must be a non-zero vector".into()));
        }
        Ok(Self { q, e0, pointing: pointing / n })
    }

    /// Feed at boresight +z.
    pub fn boresight(q: f64) -> Result<Self> {
        Self::new(q, 1.0, Vec3::z())
    }

    /// Feed turned about +x by `theta_feed` (rad): boresight `(0, -sin, cos)`.
    pub fn rotated_about_x(q: f64, theta_feed: f64) -> Result<Self> {
        Self::new(q, 1.0, Vec3::new(0.0, -theta_feed.sin(), theta_feed.cos()))
    }

    /// Rotation from the feed's own frame (boresight +z, E along +x) to the global frame.
    pub fn frame(&self) -> Rotation3<f64> {
        Rotation3::rotation_between(&Vec3::z(), &self.pointing).unwrap_or_else(|| Rotation3::from_axis_angle(&Vec3::x_axis(), PI))
    }
}

/// Field components in the feed's spherical basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e_theta: Complex64,
    pub e_phi: Complex64,
}

impl FieldSample {
    pub fn magnitude(&self) -> f64 {
        (self.e_theta.norm_sqr() + self.e_phi.norm_sqr()).sqrt()
    }
}

/// Raised-cosine far field at `(r, θ, φ)` of the feed's frame; `r` in meters.
/// Zero behind the aperture plane.
pub fn raised_cosine_field(spec: &FeedSpec, f: f64, r: f64, theta: f64, phi: f64) -> Result<FieldSample> {
    if !(r > 0.0) {
        return Err(Error::Numeric(format!("field point at r = {r} m is singular")));
    }
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    if theta > PI / 2.0 {
        return Ok(FieldSample { e_theta: Complex64::new(0.0, 0.0), e_phi: Complex64::new(0.0, 0.0) });
    }
    let k = 2.0 * PI * f / SPEED_OF_LIGHT;
    let c = if theta >= PI / 2.0 { 0.0 } else { theta.cos() };
    let amp = spec.e0 * if spec.q == 0.0 { 1.0 } else { c.powf(spec.q) } / r;
    let carrier = Complex64::from_polar(amp, -k * r);
    Ok(FieldSample { e_theta: carrier * phi.cos(), e_phi: -carrier * phi.sin() })
}

/// Field vector at a global point (meters) for a feed at `origin`.
pub fn field_at(spec: &FeedSpec, f: f64, origin: &Vec3, point: &Vec3) -> Result<Vector3<Complex64>> {
    let frame = spec.frame();
    let local = frame.inverse() * (point - origin);
    let r = local.norm();
    let theta = (local.z / r).clamp(-1.0, 1.0).acos();
    let phi = local.y.atan2(local.x);
    let s = raised_cosine_field(spec, f, r, theta, phi)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let theta_hat = frame * Vec3::new(ct * cp, ct * sp, -st);
    let phi_hat = frame * Vec3::new(-sp, cp, 0.0);
    Ok(theta_hat.map(|x| s.e_theta * x) + phi_hat.map(|x| s.e_phi * x))
}

/// Inverse of the closed-form directivity `D = 2(2q + 1)`.
pub fn q_from_directivity(d_linear: f64) -> Result<f64> {
    if !(d_linear >= 2.0) || !d_linear.is_finite() {
        return Err(Error::InfeasibleGeometry(format!("directivity {d_linear} < 2 gives q < 0")));
    }
    Ok(d_linear / 4.0 - 0.5)
}

/// Exponent from a full 3-dB beamwidth (degrees). The default form is the half-power
/// condition on the half angle with a base-10 log; `literal` uses the natural log of
/// the full angle.
pub fn q_from_beamwidth(theta_bw_full_deg: f64, literal: bool) -> Result<f64> {
    if !(theta_bw_full_deg > 0.0) {
        return Err(Error::Domain(format!("beamwidth must be positive, got {theta_bw_full_deg}")));
    }
    if literal {
        if theta_bw_full_deg >= 90.0 {
            return Err(Error::Domain(format!("literal form needs beamwidth < 90 deg, got {theta_bw_full_deg}")));
        }
        return Ok(-0.15 / theta_bw_full_deg.to_radians().cos().ln());
    }
    let half = theta_bw_full_deg / 2.0;
    if half >= 90.0 {
        return Err(Error::Domain(format!("half beamwidth {half} deg must be below 90 deg")));
    }
    Ok(-0.15 / half.to_radians().cos().log10())
}

/// Full 3-dB beamwidth (degrees) of a cos^q field pattern.
pub fn exact_beamwidth_deg(q: f64) -> f64 {
    2.0 * 2f64.powf(-1.0 / (2.0 * q)).acos().to_degrees()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f((a + b) / 2.0));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Directivity of a cos^q field pattern by quadrature of the radiated power.
pub fn directivity_numeric(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("q must be >= 0, got {q}")));
    }
    let i = integrate(|t| t.cos().powf(2.0 * q) * t.sin(), 0.0, PI / 2.0, 1e-13);
    Ok(2.0 / i)
}

pub fn directivity_closed_form(q: f64) -> f64 {
    2.0 * (2.0 * q + 1.0)
}

/// Datasheet curves of a horn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HornData {
    pub freqs: Vec<f64>,
    pub gain_dbi: Vec<f64>,
    pub beamwidth_deg: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct HornRow {
    freq_hz: f64,
    gain_dbi: f64,
    beamwidth_deg: f64,
}

impl HornData {
    pub fn new(freqs: Vec<f64>, gain_dbi: Vec<f64>, beamwidth_deg: Vec<f64>) -> Result<Self> {
        if freqs.len() != gain_dbi.len() || freqs.len() != beamwidth_deg.len() {
            return Err(Error::Alignment(format!(
                "horn columns differ in length: {} frequencies, {} gains, {} beamwidths",
                freqs.len(),
                gain_dbi.len(),
                beamwidth_deg.len()
            )));
        }
        if gain_dbi.iter().any(|g| !g.is_finite()) {
            return Err(Error::DataFormat("horn gain must be finite".into()));
        }
        if beamwidth_deg.iter().any(|b| !(*b > 0.0 && *b < 180.0)) {
            return Err(Error::DataFormat("horn beamwidth must lie in (0, 180) deg".into()));
        }
        Ok(Self { freqs, gain_dbi, beamwidth_deg })
    }

    /// Horn whose curves come from an exact cos^q pattern at every frequency.
    pub fn from_cos_q(freqs: &[f64], q: impl Fn(f64) -> f64) -> Result<Self> {
        let gain = freqs.iter().map(|&f| 10.0 * directivity_closed_form(q(f)).log10()).collect();
        let bw = freqs.iter().map(|&f| exact_beamwidth_deg(q(f))).collect();
        Self::new(freqs.to_vec(), gain, bw)
    }

    /// CSV `freq_hz,gain_dbi,beamwidth_deg`; `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let rows: Vec<HornRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Self::new(
            rows.iter().map(|r| r.freq_hz).collect(),
            rows.iter().map(|r| r.gain_dbi).collect(),
            rows.iter().map(|r| r.beamwidth_deg).collect(),
        )
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QFitPoint {
    pub freq_hz: f64,
    pub q_dir: Option<f64>,
    pub q_bw: Option<f64>,
    /// Mean of the two fits; absent when either is infeasible.
    pub q_avg: Option<f64>,
}

impl QFitPoint {
    pub fn flagged(&self) -> bool {
        self.q_avg.is_none()
    }
}

pub fn fit_q(horn: &HornData, literal: bool) -> Result<Vec<QFitPoint>> {
    let h = HornData::new(horn.freqs.clone(), horn.gain_dbi.clone(), horn.beamwidth_deg.clone())?;
    Ok(h.freqs
        .iter()
        .zip(&h.gain_dbi)
        .zip(&h.beamwidth_deg)
        .map(|((&freq_hz, &g), &bw)| {
            let q_dir = q_from_directivity(10f64.powf(g / 10.0)).ok();
            let q_bw = q_from_beamwidth(bw, literal).ok();
            let q_avg = match (q_dir, q_bw) {
                (Some(a), Some(b)) => Some((a + b) / 2.0),
                _ => None,
            };
            QFitPoint { freq_hz, q_dir, q_bw, q_avg }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn field_examples() {
        let spec = FeedSpec::boresight(2.0).unwrap();
        let s = raised_cosine_field(&spec, 10e9, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(s.magnitude(), 1.0, epsilon = 1e-15);
        assert_eq!(raised_cosine_field(&spec, 10e9, 1.0, PI / 2.0, 0.3).unwrap().magnitude(), 0.0);
        let s60 = raised_cosine_field(&spec, 10e9, 1.0, PI / 3.0, 0.7).unwrap();
        assert_relative_eq!(s60.magnitude(), 0.25, epsilon = 1e-12);
        assert_eq!(raised_cosine_field(&spec, 10e9, 1.0, 2.0, 0.0).unwrap().magnitude(), 0.0);
        assert!(matches!(raised_cosine_field(&spec, 10e9, 0.0, 0.0, 0.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn field_phase_and_polarization() {
        let spec = FeedSpec::boresight(1.0).unwrap();
        let f = 10e9;
        let r = 0.3;
        let s = raised_cosine_field(&spec, f, r, 0.2, PI / 2.0).unwrap();
        let k = 2.0 * PI * f / SPEED_OF_LIGHT;
        assert!(s.e_theta.norm() < 1e-15);
        assert_relative_eq!(s.e_phi.arg(), Complex64::from_polar(1.0, -k * r + PI).arg(), epsilon = 1e-9);
        // On boresight the field is x-polarized in global coordinates.
        let e = field_at(&spec, f, &Vec3::zeros(), &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!(e.y.norm() < 1e-15 && e.z.norm() < 1e-15);
        assert_relative_eq!(e.x.norm(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rotated_feed_points_where_asked() {
        let spec = FeedSpec::rotated_about_x(2.0, 0.5).unwrap();
        let p = spec.pointing * 0.2;
        let e = field_at(&spec, 5e9, &Vec3::zeros(), &p).unwrap();
        let mag = (e.x.norm_sqr() + e.y.norm_sqr() + e.z.norm_sqr()).sqrt();
        assert_relative_eq!(mag, 5.0, epsilon = 1e-12);
        assert!(e.iter().zip(spec.pointing.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm() < 1e-12);
    }

    #[test]
    fn directivity_examples() {
        assert_eq!(q_from_directivity(2.0).unwrap(), 0.0);
        assert_eq!(q_from_directivity(10.0).unwrap(), 2.0);
        assert!(q_from_directivity(1.5).is_err());
        assert_relative_eq!(directivity_numeric(0.0).unwrap(), 2.0, epsilon = 1e-9);
        assert_relative_eq!(directivity_numeric(2.0).unwrap(), 10.0, epsilon = 1e-9);
        for q in [0.5, 1.0, 3.7, 10.0] {
            let d = directivity_numeric(q).unwrap();
            assert!((d - directivity_closed_form(q)).abs() / d < 1e-6, "q = {q}");
        }
    }

    #[test]
    fn beamwidth_examples() {
        let bw = exact_beamwidth_deg(2.0);
        assert!((bw / 2.0 - 33.5).abs() / 33.5 < 0.03);
        assert!((q_from_beamwidth(bw, false).unwrap() - 2.0).abs() / 2.0 < 0.01);
        assert!(q_from_beamwidth(180.0, false).is_err());
        assert!(q_from_beamwidth(0.0, false).is_err());
        let qs: Vec<f64> = [40.0, 20.0, 10.0, 5.0, 1.0].iter().map(|&b| q_from_beamwidth(b, false).unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[1] > w[0]));
        let lit = q_from_beamwidth(bw, true).unwrap();
        assert!((lit - 2.0).abs() > 0.5);
    }

    #[test]
    fn fit_on_synthetic_horn() {
        let freqs: Vec<f64> = (0..9).map(|i| 2e9 + i as f64 * 1e9).collect();
        let horn = HornData::from_cos_q(&freqs, |_| 3.0).unwrap();
        for p in fit_q(&horn, false).unwrap() {
            assert!((p.q_avg.unwrap() - 3.0).abs() / 3.0 < 0.02);
        }
        let flat = HornData::new(vec![1e9, 2e9], vec![10.0, 10.0], vec![60.0, 60.0]).unwrap();
        let fit = fit_q(&flat, false).unwrap();
        assert_eq!(fit[0].q_avg, fit[1].q_avg);
        assert!(matches!(HornData::new(vec![1e9, 2e9], vec![10.0], vec![60.0, 60.0]), Err(Error::Alignment(_))));
        let weak = HornData::new(vec![1e9], vec![1.0], vec![60.0]).unwrap();
        assert!(fit_q(&weak, false).unwrap()[0].flagged());
    }

    #[test]
    fn horn_csv() {
        let text = "freq_hz,gain_dbi,beamwidth_deg\n1e9,10,60\n2e9,11,55\n";
        let h = HornData::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(h.freqs, vec![1e9, 2e9]);
        assert!(HornData::from_csv_reader("freq_hz,gain_dbi\n1e9,10\n".as_bytes()).is_err());
    }

    #[test]
    fn radiated_power_matches_directivity() {
        for q in [0.0, 1.0, 2.5, 6.0] {
            let spec = FeedSpec::boresight(q).unwrap();
            let u = |t: f64| raised_cosine_field(&spec, 1e9, 1.0, t, 0.3).unwrap().magnitude().powi(2);
            let power = 2.0 * PI * integrate(|t| u(t) * t.sin(), 0.0, PI / 2.0, 1e-13);
            assert!((power - 4.0 * PI * u(0.0) / directivity_closed_form(q)).abs() < 1e-6 * power);
        }
    }

    proptest! {
        #[test]
        fn directivity_inverse(q in 0.0f64..40.0) {
            prop_assert!((q_from_directivity(directivity_closed_form(q)).unwrap() - q).abs() < 1e-9);
        }

        #[test]
        fn beamwidth_recovers_q(q in 0.5f64..20.0) {
            let got = q_from_beamwidth(exact_beamwidth_deg(q), false).unwrap();
            prop_assert!((got - q).abs() / q < 0.005);
        }
    }
}
