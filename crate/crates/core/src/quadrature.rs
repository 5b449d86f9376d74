//! Adaptive 21-point Gauss–Kronrod quadrature over real intervals, half-lines
//! and complex line segments.
//!
//! The integrand may be real or complex; the interval list is refined by
//! bisecting the panel with the largest error estimate.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{AtlasError, Result};

/// Values a quadrature rule can accumulate.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Tolerances and the panel budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-13,
            max_panels: 2000,
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

fn gk21<T: Scalar>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let k = kronrod * h;
    let g = gauss * h;
    (k, (k - g).modulus())
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// Integrates `f` over `[a, b]`, starting from the partition given by the
/// interior `breaks` (points outside the interval are ignored).
pub fn integrate<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: QuadTol,
) -> Result<Estimate<T>> {
    let mut nodes: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    nodes.push(a);
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));

    let mut panels: Vec<Panel<T>> = nodes
        .windows(2)
        .map(|w| {
            let (value, error) = gk21(&mut f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();

    loop {
        let total = panels.iter().fold(T::zero(), |s, p| s + p.value);
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = tol.abs.max(tol.rel * total.modulus());
        if !(err.is_finite() && total.modulus().is_finite()) {
            return Err(AtlasError::Quadrature {
                value: total.modulus(),
                error: err,
            });
        }
        if err <= target {
            return Ok(Estimate {
                value: total,
                error: err,
            });
        }
        if panels.len() >= tol.max_panels {
            return Err(AtlasError::Quadrature {
                value: total.modulus(),
                error: err,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // The panel can no longer be split in floating point.
            return Err(AtlasError::Quadrature {
                value: total.modulus(),
                error: err,
            });
        }
        for (lo, hi) in [(p.a, m), (m, p.b)] {
            let (value, error) = gk21(&mut f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Integrates `f` over `[a, ∞)` via `y = a + scale·t/(1−t)`.
pub fn integrate_tail<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    scale: f64,
    tol: QuadTol,
) -> Result<Estimate<T>> {
    integrate(
        |t| {
            let s = 1.0 - t;
            let y = a + scale * t / s;
            f(y) * (scale / (s * s))
        },
        0.0,
        1.0,
        &[0.5],
        tol,
    )
}

/// Integrates `f(z) dz` along the straight segment from `a` to `b`.
pub fn integrate_segment(
    mut f: impl FnMut(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    breaks: &[f64],
    tol: QuadTol,
) -> Result<Estimate<Complex64>> {
    let d = b - a;
    let est = integrate(|s| f(a + d * s) * d, 0.0, 1.0, breaks, tol)?;
    Ok(est)
}
