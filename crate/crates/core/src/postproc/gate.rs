//! Time gating of a uniformly sampled transmission sweep.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GATE_NS: f64 = 0.5;
/// Kaiser β of the band-edge taper.
pub const TAPER_BETA: f64 = 6.0;
const ZERO_PAD: usize = 4;
const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub freqs: Vec<f64>,
    pub s21: Vec<Complex64>,
}

impl SweepTrace {
    pub fn new(freqs: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != s21.len() {
            return Err(Error::Alignment(format!("{} frequencies but {} samples", freqs.len(), s21.len())));
        }
        if freqs.len() < MIN_POINTS {
            return Err(Error::Usage(format!("a sweep needs at least {MIN_POINTS} points, got {}", freqs.len())));
        }
        let step = (freqs[freqs.len() - 1] - freqs[0]) / (freqs.len() - 1) as f64;
        if !(step > 0.0) || freqs.iter().enumerate().any(|(i, f)| (f - (freqs[0] + i as f64 * step)).abs() > 1e-6 * step) {
            return Err(Error::DataFormat("sweep frequencies must be uniformly spaced and increasing".into()));
        }
        Ok(Self { freqs, s21 })
    }

    pub fn step(&self) -> f64 {
        (self.freqs[self.freqs.len() - 1] - self.freqs[0]) / (self.freqs.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn db(&self) -> Vec<f64> {
        self.s21.iter().map(|s| 20.0 * s.norm().log10()).collect()
    }

    /// CSV `freq_hz,re_s21,im_s21`; `#` lines are comments.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            freq_hz: f64,
            re_s21: f64,
            im_s21: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let rows: Vec<Row> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Self::new(rows.iter().map(|r| r.freq_hz).collect(), rows.iter().map(|r| Complex64::new(r.re_s21, r.im_s21)).collect())
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateShape {
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateCenter {
    /// At the impulse-response magnitude peak.
    Auto,
    /// At the given delay, ns.
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatedTrace {
    pub trace: SweepTrace,
    pub center_ns: f64,
    pub window_ns: f64,
    pub shape: GateShape,
}

fn bessel_i0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Kaiser window of `n` points.
pub fn kaiser(n: usize, beta: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let norm = bessel_i0(beta);
    (0..n)
        .map(|i| {
            let r = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
            bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / norm
        })
        .collect()
}

fn gate_weight(t: f64, center: f64, width: f64, period: f64, shape: GateShape) -> f64 {
    let mut d = (t - center).rem_euclid(period);
    if d > period / 2.0 {
        d -= period;
    }
    if d.abs() > width / 2.0 {
        return 0.0;
    }
    match shape {
        GateShape::Rectangular => 1.0,
        GateShape::Hann => 0.5 * (1.0 + (2.0 * PI * d / width).cos()),
    }
}

struct Gating {
    n: usize,
    m: usize,
    dt: f64,
    taper: Vec<f64>,
    planner: FftPlanner<f64>,
}

impl Gating {
    fn new(n: usize, df: f64) -> Self {
        let m = ZERO_PAD * n;
        Self { n, m, dt: 1.0 / (m as f64 * df), taper: kaiser(n, TAPER_BETA), planner: FftPlanner::new() }
    }

    /// Tapered, zero-padded impulse response; index `i` is delay `i·dt`.
    fn impulse(&mut self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        for (i, (s, w)) in spectrum.iter().zip(&self.taper).enumerate() {
            buf[i] = s * *w;
        }
        self.planner.plan_fft_inverse(self.m).process(&mut buf);
        for v in buf.iter_mut() {
            *v /= self.m as f64;
        }
        buf
    }

    fn gate_and_return(&mut self, mut h: Vec<Complex64>, center: f64, width: f64, shape: GateShape) -> Vec<Complex64> {
        let period = self.m as f64 * self.dt;
        for (i, v) in h.iter_mut().enumerate() {
            *v *= gate_weight(i as f64 * self.dt, center, width, period, shape);
        }
        self.planner.plan_fft_forward(self.m).process(&mut h);
        h.truncate(self.n);
        h
    }
}

/// Delay of the impulse-response magnitude peak, refined by a parabola through the
/// three samples around the maximum.
fn peak_delay(h: &[Complex64], dt: f64) -> f64 {
    let m = h.len();
    let (imax, _) = h.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let y0 = h[(imax + m - 1) % m].norm();
    let y1 = h[imax].norm();
    let y2 = h[(imax + 1) % m].norm();
    let denom = y0 - 2.0 * y1 + y2;
    let shift = if denom.abs() > 0.0 { (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    (imax as f64 + shift) * dt
}

/// Windows the impulse response around the direct path and returns to the frequency
/// domain. The result is divided by the gate's effect on an ideal single path at the
/// gate center, so the band-edge taper and gate truncation are undone.
pub fn time_gate(trace: &SweepTrace, window_ns: f64, center: GateCenter, shape: GateShape) -> Result<GatedTrace> {
    let trace = SweepTrace::new(trace.freqs.clone(), trace.s21.clone())?;
    if !(window_ns > 0.0) {
        return Err(Error::Usage(format!("gate width must be positive, got {window_ns} ns")));
    }
    let df = trace.step();
    let range_ns = 1e9 / df;
    if window_ns >= range_ns {
        return Err(Error::Usage(format!("gate of {window_ns} ns exceeds the unambiguous range {range_ns:.3} ns")));
    }
    let width = window_ns * 1e-9;
    let mut g = Gating::new(trace.len(), df);
    let h = g.impulse(&trace.s21);
    let tc = match center {
        GateCenter::Auto => peak_delay(&h, g.dt),
        GateCenter::Explicit(ns) => (ns * 1e-9).rem_euclid(range_ns * 1e-9),
    };
    let gated = g.gate_and_return(h, tc, width, shape);

    // Same processing applied to a unit path delayed by tc.
    let ideal: Vec<Complex64> = (0..trace.len()).map(|i| Complex64::from_polar(1.0, -2.0 * PI * i as f64 * df * tc)).collect();
    let h_ref = g.impulse(&ideal);
    let reference = g.gate_and_return(h_ref, tc, width, shape);

    let s21 = gated
        .iter()
        .zip(&reference)
        .zip(&ideal)
        .map(|((y, r), u)| if r.norm() > 0.0 { y * u / r } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(GatedTrace { trace: SweepTrace { freqs: trace.freqs.clone(), s21 }, center_ns: tc * 1e9, window_ns, shape })
}
