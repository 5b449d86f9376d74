//! Real-coefficient polynomials and factored rational functions, evaluable at
//! real or complex arguments.

use std::f64::consts::PI;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;

use crate::quadrature::Scalar;

/// Scalars closed under the field operations used by Horner evaluation.
pub trait Field:
    Scalar + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> + From<f64> + PartialEq
{
    fn powi(self, n: i32) -> Self;
}

impl Field for f64 {
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Field for Complex64 {
    fn powi(self, n: i32) -> Self {
        Complex64::powi(&self, n)
    }
}

/// Polynomial with ascending real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Plain Horner evaluation.
    pub fn eval<T: Field>(&self, z: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z + T::from(*c))
    }

    /// Horner evaluation of the reversed polynomial `z^d p(1/z)` at `w`.
    pub fn eval_reversed<T: Field>(&self, w: T) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc * w + T::from(*c))
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// The polynomial `q(t) = p(-t)`.
    pub fn reflect(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { *c })
                .collect(),
        )
    }

    /// All complex roots by the Aberth–Ehrlich simultaneous iteration.
    ///
    /// Repeated roots converge only linearly and to about `ε^{1/m}`.
    pub fn roots(&self) -> Vec<Complex64> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[d];
        let radius = 1.0
            + self.coeffs[..d]
                .iter()
                .map(|c| (c / lead).abs())
                .fold(0.0, f64::max);
        let dp = self.derivative();
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * PI * k as f64 / d as f64))
            .collect();
        for _ in 0..2000 {
            let mut moved = 0.0f64;
            for k in 0..d {
                let fz: Complex64 = self.eval(z[k]);
                if fz.norm() == 0.0 {
                    continue;
                }
                let ratio = fz / dp.eval::<Complex64>(z[k]);
                let repulsion: Complex64 = (0..d)
                    .filter(|j| *j != k)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[k] -= step;
                    moved = moved.max(step.norm() / z[k].norm().max(1e-300));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

/// A polynomial raised to a positive power.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub poly: Polynomial,
    pub power: u32,
}

/// `scale · z^monomial · Π num_i(z)^{p_i} / Π den_j(z)^{q_j}`.
///
/// For `|z| > 1` every factor is evaluated through its reversed polynomial
/// so that high powers of large arguments never overflow on their own.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    pub scale: f64,
    pub monomial: u32,
    pub num: Vec<Factor>,
    pub den: Vec<Factor>,
}

impl RationalFn {
    fn items<T: Field>(&self, z: T, reversed: bool) -> (i32, Vec<(T, T, i32)>) {
        let mut exponent = self.monomial as i32;
        let mut items = Vec::with_capacity(self.num.len() + self.den.len());
        let w = T::from(1.0) / z;
        let signed = self
            .num
            .iter()
            .map(|f| (f, f.power as i32))
            .chain(self.den.iter().map(|f| (f, -(f.power as i32))));
        for (f, e) in signed {
            let dp = f.poly.derivative();
            if reversed {
                let d = f.poly.degree();
                exponent += e * d as i32;
                let v = f.poly.eval_reversed(w);
                // d/dz of z^d p(1/z) evaluated through w = 1/z.
                let rev_deriv = reversed_derivative(&f.poly).eval(w);
                let dv = -(rev_deriv * w * w);
                items.push((v, dv, e));
            } else {
                items.push((f.poly.eval(z), dp.eval(z), e));
            }
        }
        (exponent, items)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_deriv<T: Field>(&self, z: T) -> (T, T) {
        let reversed = z.modulus() > 1.0;
        let (e, items) = self.items(z, reversed);
        let mut prod = T::from(1.0);
        for (v, _, k) in &items {
            prod = prod * v.powi(*k);
        }
        let mut dprod = T::zero();
        for (i, (v, dv, k)) in items.iter().enumerate() {
            if *dv == T::zero() {
                continue;
            }
            let mut term = *dv * v.powi(*k - 1) * (*k as f64);
            for (j, (vj, _, kj)) in items.iter().enumerate() {
                if i != j {
                    term = term * vj.powi(*kj);
                }
            }
            dprod = dprod + term;
        }
        let ze = z.powi(e);
        let value = ze * prod * self.scale;
        let deriv = if e == 0 {
            dprod * self.scale
        } else {
            (z.powi(e - 1) * prod * (e as f64) + ze * dprod) * self.scale
        };
        (value, deriv)
    }

    pub fn eval<T: Field>(&self, z: T) -> T {
        self.eval_with_deriv(z).0
    }

    pub fn deriv<T: Field>(&self, z: T) -> T {
        self.eval_with_deriv(z).1
    }
}

fn reversed_derivative(p: &Polynomial) -> Polynomial {
    let mut rev = p.coeffs().to_vec();
    rev.reverse();
    Polynomial::new(rev).derivative()
}
