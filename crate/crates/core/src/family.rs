//! Coupling-function families: real spectral weights, their analytic
//! continuations and the pole inventory of the continued density.
//!
//! Every family is reduced to a unit-mass density `ρ(y)` on `[0, ∞)` in
//! energy units, so that the resolvent reads `ζ − (1+δ) − κ² ∫ ρ(y)/(ζ−y) dy`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, AtlasError, Result};
use crate::hydrogen::{circular_profile, RationalProfile};
use crate::params::{ComplexEnergy, ModelParams};
use crate::quadrature::{integrate, integrate_tail, QuadTol};
use crate::rational::{Polynomial, RationalFn};

/// Relative size of the disk around each pole where evaluation is refused.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Which norm makes the coupling function a unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormConvention {
    /// `‖g‖₂ = 1` over the full momentum line.
    SquareIntegral,
    /// `(2∫₀^∞ θ(y)² dy/y)^{1/2} = 1`.
    WeightedHalfLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FamilyKind {
    /// `|g|²` of a Lorentzian coupling: `w(y) = (1 + ((y−1)/μ)²)⁻²`.
    LorentzianSquared,
    /// The coupling `g(p) = √(2/π) p/(1+p²)` dilated by μ: `w(y) = t²/(1+t²)²`, `t = y/μ`.
    SimplePole,
    /// Circular hydrogen transition `n → n−1`; `w(y) = G_n(y)²` in the
    /// scaled momentum `y = ζ/μ_n`.
    HydrogenCircular(u32),
    /// `w(y) = N(t)/D(t)` with `t = (y−1)/μ`.
    UserRational {
        numerator: Vec<f64>,
        denominator: Vec<f64>,
    },
}

/// A pole of the continued density, in energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole {
    pub at: ComplexEnergy,
    pub order: u32,
}

#[derive(Debug)]
struct UserWeight {
    num: Polynomial,
    den: Polynomial,
    mass: f64,
    // Roots of D in t, with multiplicities.
    roots: Vec<(Complex64, u32)>,
}

#[derive(Debug)]
struct HydrogenShape {
    profile: RationalProfile,
    normalized: RationalFn,
    density: RationalFn,
    order: u32,
}

#[derive(Debug, Clone)]
enum Shape {
    LorentzianSquared,
    SimplePole,
    Hydrogen(Arc<HydrogenShape>),
    User(Arc<UserWeight>),
}

/// A spectral-density family; cheap to clone and share across threads.
#[derive(Debug, Clone)]
pub struct CouplingFamily {
    kind: FamilyKind,
    shape: Shape,
}

impl PartialEq for CouplingFamily {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl CouplingFamily {
    pub fn lorentzian_squared() -> Self {
        Self {
            kind: FamilyKind::LorentzianSquared,
            shape: Shape::LorentzianSquared,
        }
    }

    pub fn simple_pole() -> Self {
        Self {
            kind: FamilyKind::SimplePole,
            shape: Shape::SimplePole,
        }
    }

    pub fn hydrogen_circular(n: u32) -> Result<Self> {
        let profile = circular_profile(n)?;
        let normalized = profile.normalized();
        let density = profile.density();
        Ok(Self {
            kind: FamilyKind::HydrogenCircular(n),
            shape: Shape::Hydrogen(Arc::new(HydrogenShape {
                order: 2 * profile.denominator_power,
                profile,
                normalized,
                density,
            })),
        })
    }

    /// A user weight `N(t)/D(t)`, `t = (y−1)/μ`, coefficients ascending.
    ///
    /// The denominator must have no real zeros and exceed the numerator's
    /// degree by at least two; the weight must be non-negative on the reals.
    pub fn user_rational(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        if numerator.iter().chain(&denominator).any(|x| !x.is_finite()) {
            return domain("rational weight coefficients must be finite");
        }
        let num = Polynomial::new(numerator.clone());
        let den = Polynomial::new(denominator.clone());
        if den.is_zero() || num.is_zero() {
            return domain("rational weight needs nonzero numerator and denominator");
        }
        if den.degree() < num.degree() + 2 {
            return domain("denominator degree must exceed numerator degree by at least 2");
        }
        let raw = den.roots();
        let scale = raw.iter().map(|r| r.norm()).fold(1.0, f64::max);
        if raw.iter().any(|r| r.im.abs() <= 1e-9 * (1.0 + r.norm())) {
            return domain("denominator has a real zero");
        }
        let roots = cluster_roots(&raw);
        let w = |t: f64| num.eval(t) / den.eval(t);
        let span = 4.0 * scale;
        let grid = 4000;
        for k in 0..=grid {
            let t = -span + 2.0 * span * k as f64 / grid as f64;
            if w(t) < -1e-12 * w(t).abs().max(1.0) {
                return domain(format!("rational weight is negative at t = {t}"));
            }
        }
        let mut breaks: Vec<f64> = roots.iter().map(|(r, _)| r.re).collect();
        breaks.extend(roots.iter().map(|(r, _)| r.re - r.im.abs()));
        breaks.extend(roots.iter().map(|(r, _)| r.re + r.im.abs()));
        let tol = QuadTol::default();
        let mid = integrate(w, -span, span, &breaks, tol)?.value;
        let right = integrate_tail(w, span, scale, tol)?.value;
        let left = integrate_tail(|t| w(-t), span, scale, tol)?.value;
        let mass = mid + right + left;
        if !(mass.is_finite() && mass > 0.0) {
            return domain("rational weight has no positive mass");
        }
        Ok(Self {
            kind: FamilyKind::UserRational {
                numerator,
                denominator,
            },
            shape: Shape::User(Arc::new(UserWeight {
                num,
                den,
                mass,
                roots,
            })),
        })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn norm_convention(&self) -> NormConvention {
        match self.shape {
            Shape::Hydrogen(_) => NormConvention::WeightedHalfLine,
            _ => NormConvention::SquareIntegral,
        }
    }

    /// Short name used in reports.
    pub fn name(&self) -> String {
        match &self.kind {
            FamilyKind::LorentzianSquared => "lorentzian-squared".into(),
            FamilyKind::SimplePole => "simple-pole".into(),
            FamilyKind::HydrogenCircular(n) => format!("hydrogen-{n}"),
            FamilyKind::UserRational { .. } => "user-rational".into(),
        }
    }

    /// The real spectral weight `w(y)`, without kernel or prefactor.
    pub fn weight(&self, params: &ModelParams, y: f64) -> f64 {
        let mu = params.mu;
        match &self.shape {
            Shape::LorentzianSquared => {
                let t = (y - 1.0) / mu;
                (1.0 + t * t).powi(-2)
            }
            Shape::SimplePole => {
                let t = y / mu;
                t * t / (1.0 + t * t).powi(2)
            }
            Shape::Hydrogen(h) => {
                let g: f64 = h.normalized.eval(y);
                g * g
            }
            Shape::User(u) => {
                let t = (y - 1.0) / mu;
                u.num.eval(t) / u.den.eval(t)
            }
        }
    }

    /// Analytic continuation of [`weight`](Self::weight) to complex arguments.
    pub fn weight_continuation(
        &self,
        params: &ModelParams,
        zeta: ComplexEnergy,
    ) -> Result<ComplexEnergy> {
        let mu = params.mu;
        let check = |pole: Complex64, radius: f64| -> Result<()> {
            if (zeta - pole).norm() < radius {
                Err(AtlasError::Pole { zeta, pole })
            } else {
                Ok(())
            }
        };
        let one = c(1.0, 0.0);
        Ok(match &self.shape {
            Shape::LorentzianSquared => {
                for s in [-1.0, 1.0] {
                    check(c(1.0, s * mu), POLE_EXCLUSION * mu)?;
                }
                let t = (zeta - 1.0) / mu;
                (one + t * t).powi(-2)
            }
            Shape::SimplePole => {
                for s in [-1.0, 1.0] {
                    check(c(0.0, s * mu), POLE_EXCLUSION * mu)?;
                }
                let t = zeta / mu;
                t * t / (one + t * t).powi(2)
            }
            Shape::Hydrogen(h) => {
                for s in [-1.0, 1.0] {
                    check(c(0.0, s), POLE_EXCLUSION)?;
                }
                let g: Complex64 = h.normalized.eval(zeta);
                g * g
            }
            Shape::User(u) => {
                for (r, _) in &u.roots {
                    check(one + r * mu, POLE_EXCLUSION * mu)?;
                }
                let t = (zeta - 1.0) / mu;
                let n: Complex64 = u.num.eval(t);
                let d: Complex64 = u.den.eval(t);
                n / d
            }
        })
    }

    /// Unit-mass density `ρ(y)` on `y ≥ 0`, real arithmetic.
    pub fn density(&self, mu: f64, y: f64) -> f64 {
        match &self.shape {
            Shape::LorentzianSquared => {
                let a = (y - 1.0) / mu;
                let b = (y + 1.0) / mu;
                2.0 / (PI * mu) * ((1.0 + a * a).powi(-2) + (1.0 + b * b).powi(-2))
            }
            Shape::SimplePole => {
                let t = y / mu;
                4.0 / (PI * mu) * t * t / (1.0 + t * t).powi(2)
            }
            Shape::Hydrogen(h) => {
                let v: f64 = h.density.eval(y / mu);
                v / mu
            }
            Shape::User(u) => {
                let w = |t: f64| u.num.eval(t) / u.den.eval(t);
                (w((y - 1.0) / mu) + w((-y - 1.0) / mu)) / (u.mass * mu)
            }
        }
    }

    /// Continued density and its derivative at complex `z`.
    pub fn density_c(&self, mu: f64, z: Complex64) -> (Complex64, Complex64) {
        let one = c(1.0, 0.0);
        match &self.shape {
            Shape::LorentzianSquared => {
                let k = 2.0 / (PI * mu);
                let mut v = c(0.0, 0.0);
                let mut d = c(0.0, 0.0);
                for s in [-1.0, 1.0] {
                    let t = (z + s) / mu;
                    let q = one + t * t;
                    v += k / (q * q);
                    d += -k * 4.0 * t / (q * q * q * mu);
                }
                (v, d)
            }
            Shape::SimplePole => {
                let k = 4.0 / (PI * mu);
                let t = z / mu;
                let q = one + t * t;
                let v = k * t * t / (q * q);
                // d/dt t²/(1+t²)² = 2t(1−t²)/(1+t²)³
                let d = k * 2.0 * t * (one - t * t) / (q * q * q * mu);
                (v, d)
            }
            Shape::Hydrogen(h) => {
                let (v, d): (Complex64, Complex64) = h.density.eval_with_deriv(z / mu);
                (v / mu, d / (mu * mu))
            }
            Shape::User(u) => {
                let nd = |t: Complex64| -> (Complex64, Complex64) {
                    let n: Complex64 = u.num.eval(t);
                    let dn: Complex64 = u.num.derivative().eval(t);
                    let dd: Complex64 = u.den.eval(t);
                    let ddd: Complex64 = u.den.derivative().eval(t);
                    (n / dd, (dn * dd - n * ddd) / (dd * dd))
                };
                let k = 1.0 / (u.mass * mu);
                let (a, da) = nd((z - 1.0) / mu);
                let (b, db) = nd((-z - 1.0) / mu);
                (k * (a + b), k * (da - db) / mu)
            }
        }
    }

    /// Poles of the continued density in the open lower half-plane.
    pub fn lower_poles(&self, mu: f64) -> Vec<Pole> {
        match &self.shape {
            Shape::LorentzianSquared => vec![
                Pole {
                    at: c(1.0, -mu),
                    order: 2,
                },
                Pole {
                    at: c(-1.0, -mu),
                    order: 2,
                },
            ],
            Shape::SimplePole => vec![Pole {
                at: c(0.0, -mu),
                order: 2,
            }],
            Shape::Hydrogen(h) => vec![Pole {
                at: c(0.0, -mu),
                order: h.order,
            }],
            Shape::User(u) => {
                let mut out = Vec::new();
                for (r, m) in &u.roots {
                    let direct = c(1.0, 0.0) + r * mu;
                    let mirrored = -direct;
                    for p in [direct, mirrored] {
                        if p.im < 0.0 {
                            out.push(Pole { at: p, order: *m });
                        }
                    }
                }
                out
            }
        }
    }

    /// Poles of the continued weight `w` itself, in its own argument.
    pub fn weight_poles(&self, mu: f64) -> Vec<Pole> {
        match &self.shape {
            Shape::LorentzianSquared => vec![Pole {
                at: c(1.0, -mu),
                order: 2,
            }],
            Shape::SimplePole => vec![Pole {
                at: c(0.0, -mu),
                order: 2,
            }],
            Shape::Hydrogen(h) => vec![Pole {
                at: c(0.0, -1.0),
                order: h.order,
            }],
            Shape::User(u) => u
                .roots
                .iter()
                .filter(|(r, _)| r.im < 0.0)
                .map(|(r, m)| Pole {
                    at: c(1.0, 0.0) + r * mu,
                    order: *m,
                })
                .collect(),
        }
    }

    /// Smallest distance from the real axis to a pole of the continued density.
    pub fn strip_depth(&self, mu: f64) -> f64 {
        self.lower_poles(mu)
            .iter()
            .filter(|p| p.at.re >= 0.0)
            .map(|p| -p.at.im)
            .fold(f64::INFINITY, f64::min)
    }

    /// Radius of the disk around `pole` inside which evaluation is refused.
    pub fn exclusion_radius(&self, mu: f64) -> f64 {
        POLE_EXCLUSION * mu
    }

    /// Rejects `zeta` inside any pole-exclusion disk of the continued density.
    pub fn check_poles(&self, mu: f64, zeta: ComplexEnergy) -> Result<()> {
        let r = self.exclusion_radius(mu);
        for p in self.lower_poles(mu) {
            if (zeta - p.at).norm() < r {
                return Err(AtlasError::Pole { zeta, pole: p.at });
            }
        }
        Ok(())
    }

    /// Natural length scale of the density, used to map the integration tail.
    pub fn length_scale(&self, mu: f64) -> f64 {
        match &self.shape {
            Shape::LorentzianSquared => mu.max(1.0),
            Shape::SimplePole | Shape::Hydrogen(_) => mu,
            Shape::User(u) => {
                let spread = u.roots.iter().map(|(r, _)| r.norm()).fold(1.0, f64::max);
                (mu * spread).max(1.0)
            }
        }
    }

    /// Points where the real-axis density varies on a short scale.
    pub fn breakpoints(&self, mu: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for p in self.lower_poles(mu) {
            let w = p.at.im.abs();
            out.push(p.at.re.abs());
            for k in [1.0, 3.0, 10.0, 30.0] {
                out.push(p.at.re.abs() + k * w);
                out.push(p.at.re.abs() - k * w);
            }
        }
        out.retain(|x| *x > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// The profile of a hydrogen family, if this is one.
    pub fn hydrogen_profile(&self) -> Option<&RationalProfile> {
        match &self.shape {
            Shape::Hydrogen(h) => Some(&h.profile),
            _ => None,
        }
    }
}

fn cluster_roots(raw: &[Complex64]) -> Vec<(Complex64, u32)> {
    let mut out: Vec<(Complex64, u32, Complex64)> = Vec::new();
    for r in raw {
        let tol = 1e-4 * (1.0 + r.norm());
        if let Some(slot) = out
            .iter_mut()
            .find(|(centre, _, _)| (centre - r).norm() < tol)
        {
            slot.1 += 1;
            slot.2 += r;
            slot.0 = slot.2 / slot.1 as f64;
        } else {
            out.push((*r, 1, *r));
        }
    }
    out.into_iter().map(|(r, m, _)| (r, m)).collect()
}

/// The Lorentzian coupling `g(k) = √(2/π) (μk₀)^{−1/2} / (1 + μ⁻²(k/k₀−1)²)`.
pub fn lorentzian_coupling(k: f64, mu: f64, k0: f64) -> f64 {
    let t = (k / k0 - 1.0) / mu;
    (2.0 / PI).sqrt() / (mu * k0).sqrt() / (1.0 + t * t)
}
