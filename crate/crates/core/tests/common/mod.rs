//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use fssdome::circuit::{Block, DielectricLayer, Polarization, SheetElement, SheetKind, StackSpec, SPEED_OF_LIGHT};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const ETA0: f64 = 120.0 * PI;

/// Region between interfaces: complex relative permittivity and thickness in meters.
struct Region {
    eps: Complex64,
    d: f64,
}

/// Solves for reflected and transmitted amplitudes of a plane wave hitting `stack`
/// at angle `theta`. Unknowns are the forward/backward amplitudes in every region;
/// each interface contributes E continuity and an H jump equal to the sheet current.
pub fn boundary_solve(stack: &StackSpec, f: f64, theta: f64, pol: Polarization) -> (Complex64, Complex64) {
    let j = Complex64::i();
    let k0 = 2.0 * PI * f / SPEED_OF_LIGHT;
    let s = theta.sin();
    let mut regions = vec![Region { eps: Complex64::new(1.0, 0.0), d: 0.0 }];
    let mut sheets: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    for b in &stack.blocks {
        match b {
            Block::Dielectric(l) => {
                regions.push(Region { eps: Complex64::new(l.eps_r, -l.eps_r * l.loss_tangent), d: l.thickness });
                sheets.push(Complex64::new(0.0, 0.0));
            }
            Block::Sheet(sh) => {
                let w = 2.0 * PI * f;
                let y = match sh.kind {
                    SheetKind::Capacitive => j * w * sh.value,
                    SheetKind::Inductive => 1.0 / (j * w * sh.value),
                };
                *sheets.last_mut().unwrap() += y;
            }
        }
    }
    regions.push(Region { eps: Complex64::new(1.0, 0.0), d: 0.0 });
    let n = regions.len();
    // Interface i sits between regions i and i + 1 and carries sheets[i].
    let kz: Vec<Complex64> = regions.iter().map(|r| k0 * (r.eps - s * s).sqrt()).collect();
    let eta: Vec<Complex64> = regions
        .iter()
        .zip(&kz)
        .map(|(r, kz)| {
            let scale = stack.z0 / ETA0;
            match pol {
                Polarization::Te => scale * ETA0 * k0 / kz,
                Polarization::Tm => scale * ETA0 * kz / (k0 * r.eps),
            }
        })
        .collect();
    // Unknowns: b0, then (a_i, b_i) for interior regions, then a_last.
    let m = 2 * (n - 2) + 2;
    let col_a = |i: usize| if i == n - 1 { m - 1 } else { 2 * i - 1 };
    let col_b = |i: usize| if i == 0 { 0 } else { 2 * i };
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    let one = Complex64::new(1.0, 0.0);
    #[allow(clippy::needless_range_loop)]
    for i in 0..n - 1 {
        let (l, r) = (i, i + 1);
        let ph = (-j * kz[l] * regions[l].d).exp();
        let (ef, eb) = (ph, 1.0 / ph);
        let y = sheets[i];
        let (row_e, row_h) = (2 * i, 2 * i + 1);
        // Left region at its far face; a_0 = 1 is known.
        if l == 0 {
            rhs[row_e] -= ef;
            rhs[row_h] -= ef / eta[l];
        } else {
            a[(row_e, col_a(l))] += ef;
            a[(row_h, col_a(l))] += ef / eta[l];
        }
        a[(row_e, col_b(l))] += eb;
        a[(row_h, col_b(l))] -= eb / eta[l];
        // Right region at its near face; b_last = 0.
        a[(row_e, col_a(r))] -= one;
        a[(row_h, col_a(r))] -= one / eta[r] + y;
        if r != n - 1 {
            a[(row_e, col_b(r))] -= one;
            a[(row_h, col_b(r))] -= -one / eta[r] + y;
        }
    }
    let x = a.lu().solve(&rhs).expect("boundary system is regular");
    (x[0], x[m - 1])
}

pub fn random_stack(rng: &mut ChaCha8Rng, lossless: bool) -> StackSpec {
    let n = rng.gen_range(1..=8);
    let blocks = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let tan = if lossless { 0.0 } else { rng.gen_range(0.0..0.02) };
                Block::Dielectric(DielectricLayer::new(rng.gen_range(0.1e-3..3e-3), rng.gen_range(1.0..10.0), tan).unwrap())
            } else if rng.gen_bool(0.5) {
                Block::Sheet(SheetElement::capacitive(rng.gen_range(1e-15..200e-15)).unwrap())
            } else {
                Block::Sheet(SheetElement::inductive(rng.gen_range(0.1e-9..10e-9)).unwrap())
            }
        })
        .collect();
    StackSpec::new(blocks)
}

pub fn wavelength_mm(f: f64) -> f64 {
    299_792_458.0 / f * 1e3
}

/// `∫∫ exp(-(x² + y²)/w0²) exp(j u·r) dA = π w0² exp(-w0² |u|²/4)`.
pub fn continuous_gaussian(w0: f64, f: f64, theta: f64) -> f64 {
    let u = 2.0 * PI / wavelength_mm(f) * theta.sin();
    PI * w0 * w0 * (-w0 * w0 * u * u / 4.0).exp()
}

pub fn degrees(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| (lo + i as f64 * step).to_radians()).collect()
}

/// Far field of a Gaussian transmission aperture of waist `w1` shifted by `dx` along x.
pub fn synthetic_scan(w1: f64, dx: f64, f: f64, theta: f64, phi: f64) -> Complex64 {
    let k = 2.0 * PI / wavelength_mm(f);
    let amp = continuous_gaussian(w1, f, theta) / (PI * w1 * w1);
    Complex64::from_polar(amp, k * dx * theta.sin() * phi.cos())
}

/// Composite Simpson weights for an odd number of equally spaced nodes.
pub fn simpson(n: usize, h: f64) -> Vec<f64> {
    assert!(n % 2 == 1);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}
