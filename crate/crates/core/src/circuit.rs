//! Cascaded two-port (ABCD) model of the capacitive / inductive / capacitive
//! sheet stack and its scattering response.
//!
//! Time convention is `e^{+jωt}`; a forward wave accumulates phase `e^{-jβd}`.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free-space wave impedance used by the circuit model, 120π Ω.
pub const FREE_SPACE_IMPEDANCE: f64 = 120.0 * PI;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Default metal conductivity carried as stack metadata, S/m.
pub const DEFAULT_CONDUCTIVITY: f64 = 1.0e6;
/// Loss tangent of the printed ABS dielectric.
pub const ABS_LOSS_TANGENT: f64 = 0.006;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);

/// Transfer matrix of a two-port block.
///
/// `b` is in ohms, `c` in siemens, `a` and `d` are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl AbcdMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    /// Shunt admittance `y` as a two-port, `[[1, 0], [y, 1]]`.
    pub fn shunt(y: Complex64) -> Self {
        Self::new(ONE, ZERO, y, ONE)
    }

    /// Series impedance `z` as a two-port, `[[1, z], [0, 1]]`.
    pub fn series(z: Complex64) -> Self {
        Self::new(ONE, z, ZERO, ONE)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|v| v.is_finite())
    }
}

impl Mul for AbcdMatrix {
    type Output = AbcdMatrix;

    fn mul(self, rhs: AbcdMatrix) -> AbcdMatrix {
        AbcdMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SheetKind {
    Capacitive,
    Inductive,
}

/// A thin patterned metal sheet modelled as a pure shunt reactance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheetElement {
    pub kind: SheetKind,
    /// Farads for capacitive sheets, henries for inductive sheets.
    pub value: f64,
}

impl SheetElement {
    pub fn new(kind: SheetKind, value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!("sheet value must be positive, got {value}")));
        }
        Ok(Self { kind, value })
    }

    pub fn capacitive(farads: f64) -> Result<Self> {
        Self::new(SheetKind::Capacitive, farads)
    }

    pub fn inductive(henries: f64) -> Result<Self> {
        Self::new(SheetKind::Inductive, henries)
    }

    /// Shunt admittance at frequency `f`: `jωC` or `1/(jωL)`.
    pub fn admittance(&self, f: f64) -> Result<Complex64> {
        check_frequency(f)?;
        if !(self.value > 0.0) {
            return Err(Error::Domain(format!("sheet value must be positive, got {}", self.value)));
        }
        let omega = 2.0 * PI * f;
        Ok(match self.kind {
            SheetKind::Capacitive => J * (omega * self.value),
            SheetKind::Inductive => ONE / (J * (omega * self.value)),
        })
    }
}

/// Homogeneous dielectric spacer between sheets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricLayer {
    /// Meters.
    pub thickness: f64,
    pub eps_r: f64,
    #[serde(default)]
    pub loss_tangent: f64,
}

impl DielectricLayer {
    pub fn new(thickness: f64, eps_r: f64, loss_tangent: f64) -> Result<Self> {
        let layer = Self { thickness, eps_r, loss_tangent };
        layer.validate()?;
        Ok(layer)
    }

    pub fn lossless(thickness: f64, eps_r: f64) -> Result<Self> {
        Self::new(thickness, eps_r, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.thickness >= 0.0) || !self.thickness.is_finite() {
            return Err(Error::Domain(format!("thickness must be >= 0, got {}", self.thickness)));
        }
        if !(self.eps_r >= 1.0) || !self.eps_r.is_finite() {
            return Err(Error::Domain(format!("relative permittivity must be >= 1, got {}", self.eps_r)));
        }
        if !(self.loss_tangent >= 0.0) || !self.loss_tangent.is_finite() {
            return Err(Error::Domain(format!("loss tangent must be >= 0, got {}", self.loss_tangent)));
        }
        Ok(())
    }

    /// `ε_r (1 - j tanδ)`.
    pub fn complex_permittivity(&self) -> Complex64 {
        Complex64::new(self.eps_r, -self.eps_r * self.loss_tangent)
    }

    /// Wave impedance `Z0 / √ε_r` referenced to the 120π Ω free-space impedance.
    pub fn wave_impedance(&self) -> Complex64 {
        FREE_SPACE_IMPEDANCE / self.complex_permittivity().sqrt()
    }

    /// Propagation constant `(ω/c)√ε_r` in rad/m.
    pub fn propagation_constant(&self, f: f64) -> Complex64 {
        2.0 * PI * f / SPEED_OF_LIGHT * self.complex_permittivity().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Block {
    Dielectric(DielectricLayer),
    Sheet(SheetElement),
}

/// Ordered list of blocks between two semi-infinite media of impedance `z0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSpec {
    pub blocks: Vec<Block>,
    /// Termination impedance, ohms.
    pub z0: f64,
    /// Metal conductivity in S/m. Metadata only; the circuit model has no conductor loss.
    pub conductivity: f64,
}

impl Default for StackSpec {
    fn default() -> Self {
        Self { blocks: Vec::new(), z0: FREE_SPACE_IMPEDANCE, conductivity: DEFAULT_CONDUCTIVITY }
    }
}

impl StackSpec {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self { blocks, ..Self::default() }
    }

    /// The symmetric capacitive-inductive-capacitive cell: `d2, C, d1, L, d1, C, d2`.
    ///
    /// Thicknesses in meters.
    pub fn unit_cell(capacitance: f64, inductance: f64, d1: f64, d2: f64, eps_r: f64, loss_tangent: f64) -> Result<Self> {
        let outer = Block::Dielectric(DielectricLayer::new(d2, eps_r, loss_tangent)?);
        let inner = Block::Dielectric(DielectricLayer::new(d1, eps_r, loss_tangent)?);
        let cap = Block::Sheet(SheetElement::capacitive(capacitance)?);
        let ind = Block::Sheet(SheetElement::inductive(inductance)?);
        Ok(Self::new(vec![outer, cap, inner, ind, inner, cap, outer]))
    }

    /// Lossless Table-I cell: 78 fF, 1.66 nH, d1 = 1.25 mm, d2 = 1 mm, ε_r = 2.4.
    pub fn reference_cell() -> Self {
        Self::unit_cell(78e-15, 1.66e-9, 1.25e-3, 1.0e-3, 2.4, 0.0).expect("reference cell is valid")
    }

    pub fn is_symmetric(&self) -> bool {
        self.blocks.iter().eq(self.blocks.iter().rev())
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.blocks.reverse();
        out
    }

    pub fn is_lossless(&self) -> bool {
        self.blocks.iter().all(|b| match b {
            Block::Dielectric(d) => d.loss_tangent == 0.0,
            Block::Sheet(_) => true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Te,
    Tm,
}

/// Scattering parameters of a stack on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SparamSpectrum {
    pub freqs: Vec<f64>,
    pub s11: Vec<Complex64>,
    pub s21: Vec<Complex64>,
    pub s12: Vec<Complex64>,
    pub s22: Vec<Complex64>,
    /// Set when the stack reads the same in both directions; then `s22 == s11`, `s12 == s21`.
    pub symmetric: bool,
}

impl SparamSpectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn s21_db(&self) -> Vec<f64> {
        self.s21.iter().map(|s| 20.0 * s.norm().log10()).collect()
    }

    pub fn s11_db(&self) -> Vec<f64> {
        self.s11.iter().map(|s| 20.0 * s.norm().log10()).collect()
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    Ok(())
}

/// Uniform grid `start, start + step, ..., stop` (inclusive within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Error::Domain(format!("bad grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Default analysis grid, 1-30 GHz in 10 MHz steps.
pub fn default_grid() -> Vec<f64> {
    linear_grid(1.0e9, 30.0e9, 10.0e6).expect("static grid")
}

pub fn shunt_sheet_abcd(element: &SheetElement, f: f64) -> Result<AbcdMatrix> {
    Ok(AbcdMatrix::shunt(element.admittance(f)?))
}

pub fn dielectric_line_abcd(layer: &DielectricLayer, f: f64) -> Result<AbcdMatrix> {
    check_frequency(f)?;
    layer.validate()?;
    Ok(line_abcd(layer.propagation_constant(f) * layer.thickness, layer.wave_impedance()))
}

fn line_abcd(phase: Complex64, z: Complex64) -> AbcdMatrix {
    let (cos, sin) = (phase.cos(), phase.sin());
    AbcdMatrix::new(cos, J * z * sin, J * sin / z, cos)
}

/// Left-to-right product of the blocks.
pub fn cascade(blocks: &[AbcdMatrix]) -> Result<AbcdMatrix> {
    let (first, rest) = blocks.split_first().ok_or_else(|| Error::Domain("cascade of an empty block list".into()))?;
    let t = rest.iter().fold(*first, |acc, m| acc * *m);
    if !t.is_finite() {
        return Err(Error::Numeric("cascade overflowed".into()));
    }
    Ok(t)
}

fn sparams_all(t: &AbcdMatrix, z0: Complex64) -> Result<[Complex64; 4]> {
    let bz = t.b / z0;
    let cz = t.c * z0;
    let den = t.a + bz + cz + t.d;
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::Singular("A + B/Z0 + C·Z0 + D = 0".into()));
    }
    let s11 = (t.a + bz - cz - t.d) / den;
    let s21 = 2.0 / den;
    let s12 = 2.0 * t.determinant() / den;
    let s22 = (-t.a + bz - cz + t.d) / den;
    Ok([s11, s21, s12, s22])
}

/// `(S11, S21)` of a two-port referenced to `z0` at both ports.
pub fn abcd_to_sparams(t: &AbcdMatrix, z0: f64) -> Result<(Complex64, Complex64)> {
    if !(z0 > 0.0) {
        return Err(Error::Domain(format!("reference impedance must be positive, got {z0}")));
    }
    let [s11, s21, _, _] = sparams_all(t, Complex64::new(z0, 0.0))?;
    Ok((s11, s21))
}

/// Cos of the refraction angle in a medium of permittivity `eps` for a plane wave
/// incident from free space with `sin θ = sin_theta`.
fn refracted_cos(sin_theta: f64, eps: Complex64) -> Complex64 {
    let s = sin_theta / eps.sqrt();
    let c = (ONE - s * s).sqrt();
    // Decaying branch for the e^{+jωt} convention.
    if c.re < 0.0 {
        -c
    } else {
        c
    }
}

fn stack_abcd_at(stack: &StackSpec, f: f64, sin_theta: f64, pol: Polarization) -> Result<AbcdMatrix> {
    let mut t = AbcdMatrix::identity();
    for block in &stack.blocks {
        let m = match block {
            Block::Sheet(s) => shunt_sheet_abcd(s, f)?,
            Block::Dielectric(layer) => {
                check_frequency(f)?;
                layer.validate()?;
                let cos_t = refracted_cos(sin_theta, layer.complex_permittivity());
                let z = match pol {
                    Polarization::Te => layer.wave_impedance() / cos_t,
                    Polarization::Tm => layer.wave_impedance() * cos_t,
                };
                line_abcd(layer.propagation_constant(f) * cos_t * layer.thickness, z)
            }
        };
        t = t * m;
    }
    if !t.is_finite() {
        return Err(Error::Numeric(format!("stack cascade overflowed at {f} Hz")));
    }
    Ok(t)
}

/// Overall transfer matrix of a stack at normal incidence.
pub fn stack_abcd(stack: &StackSpec, f: f64) -> Result<AbcdMatrix> {
    stack_abcd_at(stack, f, 0.0, Polarization::Te)
}

fn check_grid(freqs: &[f64]) -> Result<()> {
    for &f in freqs {
        check_frequency(f)?;
    }
    if freqs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

fn response(stack: &StackSpec, freqs: &[f64], theta: f64, pol: Polarization) -> Result<SparamSpectrum> {
    check_grid(freqs)?;
    if !(stack.z0 > 0.0) {
        return Err(Error::Domain(format!("termination impedance must be positive, got {}", stack.z0)));
    }
    let (sin_t, cos_t) = theta.sin_cos();
    let z_term = match pol {
        Polarization::Te => stack.z0 / cos_t,
        Polarization::Tm => stack.z0 * cos_t,
    };
    let symmetric = stack.is_symmetric();
    let n = freqs.len();
    let mut out = SparamSpectrum {
        freqs: freqs.to_vec(),
        s11: Vec::with_capacity(n),
        s21: Vec::with_capacity(n),
        s12: Vec::with_capacity(n),
        s22: Vec::with_capacity(n),
        symmetric,
    };
    for &f in freqs {
        let t = stack_abcd_at(stack, f, sin_t, pol)?;
        let [s11, s21, s12, s22] = sparams_all(&t, Complex64::new(z_term, 0.0))?;
        out.s11.push(s11);
        out.s21.push(s21);
        if symmetric {
            out.s12.push(s21);
            out.s22.push(s11);
        } else {
            out.s12.push(s12);
            out.s22.push(s22);
        }
    }
    Ok(out)
}

/// Normal-incidence S-parameters of `stack` over `freqs`.
pub fn stack_response(stack: &StackSpec, freqs: &[f64]) -> Result<SparamSpectrum> {
    response(stack, freqs, 0.0, Polarization::Te)
}

/// Oblique-incidence S-parameters with TE (`Z/cosθ`) or TM (`Z·cosθ`) wave impedances
/// and Snell refraction into each dielectric. Sheet reactances are angle independent.
pub fn stack_response_oblique(stack: &StackSpec, freqs: &[f64], theta: f64, pol: Polarization) -> Result<SparamSpectrum> {
    if !(0.0..PI / 2.0).contains(&theta) {
        return Err(Error::Domain(format!("incidence angle must be in [0, π/2), got {theta}")));
    }
    response(stack, freqs, theta, pol)
}
