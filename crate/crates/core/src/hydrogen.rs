//! Circular-state transitions `|n,n-1,0> -> |n-1,n-2,0>` of hydrogen: the
//! coupling profiles, the dimensionless constants and the two resonances of
//! the continued resolvent.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, AtlasError, Result};
use crate::family::CouplingFamily;
use crate::params::{ComplexEnergy, ModelParams};
use crate::quadrature::{integrate, integrate_tail, QuadTol};
use crate::rational::{Factor, Polynomial, RationalFn};
use crate::resolvent::EvalOptions;
use crate::rootfind::{self, RootResult, Sheet};

/// Ionization energy of hydrogen, eV.
pub const E_I: f64 = 13.6057;
/// ħc, eV·nm.
pub const HBAR_C: f64 = 197.327;
/// Bohr radius, nm.
pub const A0: f64 = 0.0529177;
/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.036;
/// ħ, eV·s.
pub const HBAR: f64 = 6.58212e-16;

/// Largest principal quantum number accepted by [`transition`].
pub const MAX_N: u32 = 400;

/// `y · N(y) / (1+y²)^p` with exact integer coefficients.
///
/// `numerator` holds the coefficients of `N` in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalProfile {
    pub numerator: Vec<BigInt>,
    pub denominator_power: u32,
    /// Natural log of the weighted norm `(2∫₀^∞ θ(y)² dy/y)^{1/2}`.
    pub log_norm: f64,
    scaled: Polynomial,
    scale_log: f64,
}

impl RationalProfile {
    fn from_exact(numerator: Vec<BigInt>, denominator_power: u32) -> Result<Self> {
        let bits = numerator.iter().map(|c| c.bits()).max().unwrap_or(0);
        let scaled = Polynomial::new(numerator.iter().map(|c| scaled_to_f64(c, bits)).collect());
        let scale_log = bits as f64 * std::f64::consts::LN_2;
        let mut profile = Self {
            numerator,
            denominator_power,
            // Unit scaled norm while the actual norm is integrated.
            log_norm: scale_log,
            scaled,
            scale_log,
        };
        let sq = profile.squared_over_y(2.0);
        let tol = QuadTol::default();
        let breaks = [0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5];
        let body = integrate(|y: f64| sq.eval(y), 0.0, 4.0, &breaks, tol)?;
        let tail = integrate_tail(|y: f64| sq.eval(y), 4.0, 4.0, tol)?;
        let norm_sq = body.value + tail.value;
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(AtlasError::Overflow("profile norm".into()));
        }
        profile.log_norm = profile.scale_log + 0.5 * norm_sq.ln();
        Ok(profile)
    }

    /// Weighted norm; may be very large for high `n`.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// `factor · θ(y)² / (y · ‖θ‖²)` as a factored rational function of `y`.
    fn squared_over_y(&self, factor: f64) -> RationalFn {
        let norm_scaled = (2.0 * (self.log_norm - self.scale_log)).exp();
        RationalFn {
            scale: factor / norm_scaled,
            monomial: 1,
            num: vec![Factor {
                poly: self.scaled.clone(),
                power: 2,
            }],
            den: vec![Factor {
                poly: Polynomial::new(vec![1.0, 0.0, 1.0]),
                power: 2 * self.denominator_power,
            }],
        }
    }

    /// The normalized profile `θ(y)/‖θ‖` as a factored rational function.
    pub fn normalized(&self) -> RationalFn {
        let norm_scaled = (self.log_norm - self.scale_log).exp();
        RationalFn {
            scale: 1.0 / norm_scaled,
            monomial: 1,
            num: vec![Factor {
                poly: self.scaled.clone(),
                power: 1,
            }],
            den: vec![Factor {
                poly: Polynomial::new(vec![1.0, 0.0, 1.0]),
                power: self.denominator_power,
            }],
        }
    }

    /// `2 θ(y)² / (y ‖θ‖²)`, the unit-mass spectral density in the scaled
    /// variable.
    pub fn density(&self) -> RationalFn {
        self.squared_over_y(2.0)
    }

    /// Unnormalized value `θ(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        self.normalized().eval(y) * self.norm()
    }
}

fn scaled_to_f64(c: &BigInt, bits: u64) -> f64 {
    if c.is_zero() {
        return 0.0;
    }
    let b = c.bits();
    let keep = 60u64;
    let (mantissa, shifted) = if b > keep {
        ((c >> (b - keep)).to_f64().unwrap_or(0.0), b - keep)
    } else {
        (c.to_f64().unwrap_or(0.0), 0)
    };
    // mantissa · 2^(shifted − bits), applied in two halves to avoid a
    // spurious underflow of the power itself.
    let e = shifted as i64 - bits as i64;
    let half = (e / 2) as i32;
    mantissa * 2f64.powi(half) * 2f64.powi(e as i32 - half)
}

/// Numerators `P_p` of `d^p/dx^p (x·arctan(1/x)) = P_p(x)/(1+x²)^p`.
fn derivative_numerators(p: u32) -> Vec<BigInt> {
    let mut poly = vec![BigInt::from(-2)];
    for m in 2..p {
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            if k >= 1 {
                let d = c * BigInt::from(k);
                next[k - 1] += &d;
                next[k + 1] += &d;
            }
            next[k + 1] -= c * BigInt::from(2 * m);
        }
        poly = next;
    }
    poly
}

/// Coefficients of `Q_{p-2}` (ascending), defined by
/// `A_p(y) = (−1)^{p+1} y Q_{p−2}(y) / (1+y²)^p`.
pub fn q_polynomial(p: u32) -> Result<Vec<BigInt>> {
    if p < 2 {
        return domain(format!("p must be at least 2, got {p}"));
    }
    let mut q = derivative_numerators(p);
    q.resize(p as usize - 1, BigInt::zero());
    q.reverse();
    while q.len() > 1 && q.last().is_some_and(|c| c.is_zero()) {
        q.pop();
    }
    Ok(q)
}

/// `A_p(y) = ∫₀^∞ j₁(yx) x^p e^{−x} dx` as an exact rational profile.
pub fn ap_profile(p: u32) -> Result<RationalProfile> {
    let mut q = q_polynomial(p)?;
    if p % 2 == 0 {
        for c in q.iter_mut() {
            *c = -c.clone();
        }
    }
    RationalProfile::from_exact(q, p)
}

fn add_scaled(acc: &mut Vec<BigInt>, poly: &[BigInt], factor: &BigInt, shift: usize) {
    if acc.len() < poly.len() + shift {
        acc.resize(poly.len() + shift, BigInt::zero());
    }
    for (k, c) in poly.iter().enumerate() {
        acc[k + shift] += c * factor;
    }
}

/// The profile `φ_n(y) = y(α_n Q_{2n−4} + β_n (1+y²) Q_{2n−5}) / (1+y²)^{2n−2}`.
pub fn circular_profile(n: u32) -> Result<RationalProfile> {
    if n < 2 {
        return domain(format!("circular transitions need n >= 2, got {n}"));
    }
    if n > MAX_N {
        return Err(AtlasError::Overflow(format!(
            "transition n = {n} exceeds {MAX_N}"
        )));
    }
    let (a, b) = alpha_beta(n);
    let mut num = Vec::new();
    add_scaled(&mut num, &q_polynomial(2 * n - 2)?, &BigInt::from(a), 0);
    if b != 0 {
        let q = q_polynomial(2 * n - 3)?;
        let factor = BigInt::from(b);
        add_scaled(&mut num, &q, &factor, 0);
        add_scaled(&mut num, &q, &factor, 2);
    }
    while num.len() > 1 && num.last().is_some_and(|c| c.is_zero()) {
        num.pop();
    }
    RationalProfile::from_exact(num, 2 * n - 2)
}

fn alpha_beta(n: u32) -> (i64, i64) {
    let n = n as i64;
    (2 * n * n - 3 * n + 2, (2 * n - 1) * (2 * n - 1) * (n - 2))
}

/// The normalized 2p→1s profile `−√3 y/(1+y²)²`.
pub fn g2_profile(y: f64) -> f64 {
    -3f64.sqrt() * y / (1.0 + y * y).powi(2)
}

/// Constants of one circular transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydrogenTransition {
    pub n: u32,
    pub alpha_n: i64,
    pub beta_n: i64,
    /// `D_n`; may underflow for very large `n`, see `log_d_n`.
    pub d_n: f64,
    pub log_d_n: f64,
    pub mu_n: f64,
    pub kappa_n: f64,
    /// `‖φ_n‖` in the weighted norm.
    pub profile_norm: f64,
    pub level_spacing_ev: f64,
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

fn ln_k(n: u32) -> f64 {
    let nf = n as f64;
    (nf + 0.5) * (2.0 / nf).ln() - 0.5 * ln_factorial(2 * n)
}

/// Lower bound `E_I⁻¹ ħc/a₀ ≈ 2/α` of every `μ_n / (n(n−1))`.
pub fn mu_lower_bound() -> f64 {
    HBAR_C / A0 / E_I
}

/// Level spacing `ℰ_{n,n−1} = E_I (1/(n−1)² − 1/n²)` in eV.
pub fn level_spacing_ev(n: u32) -> f64 {
    let a = (n - 1) as f64;
    let b = n as f64;
    E_I * (1.0 / (a * a) - 1.0 / (b * b))
}

/// Constants of the transition `|n,n−1,0> → |n−1,n−2,0>`.
pub fn transition(n: u32) -> Result<HydrogenTransition> {
    let family = cached_family(n)?;
    let profile = family
        .hydrogen_profile()
        .ok_or_else(|| AtlasError::Degenerate("not a hydrogen family".into()))?;
    Ok(transition_from_profile(n, profile))
}

fn transition_from_profile(n: u32, profile: &RationalProfile) -> HydrogenTransition {
    let (alpha_n, beta_n) = alpha_beta(n);
    let nf = n as f64;
    let log_d_n =
        ln_k(n) + ln_k(n - 1) - nf.ln() - 0.5 * ((2.0 * nf - 1.0) * (2.0 * nf - 3.0)).ln();
    let log_kappa = 0.5 * (3.0 / std::f64::consts::PI).ln()
        + 0.5 * ALPHA.ln()
        + (2.0 * nf + 1.0) * (nf * (nf - 1.0)).ln()
        - 2.0 * nf * (2.0 * nf - 1.0).ln()
        + log_d_n
        + profile.log_norm;
    HydrogenTransition {
        n,
        alpha_n,
        beta_n,
        d_n: log_d_n.exp(),
        log_d_n,
        mu_n: nf * (nf - 1.0) * mu_lower_bound(),
        kappa_n: log_kappa.exp(),
        profile_norm: profile.norm(),
        level_spacing_ev: level_spacing_ev(n),
    }
}

impl HydrogenTransition {
    /// Parameters of the resolvent `F` for this transition (offset 1, no detuning).
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.kappa_n, self.mu_n, 0.0)?.with_energy_scale(self.level_spacing_ev)
    }

    pub fn family(&self) -> Result<CouplingFamily> {
        cached_family(self.n)
    }
}

/// The hydrogen family for transition `n`, built once per process.
pub fn cached_family(n: u32) -> Result<CouplingFamily> {
    static CACHE: OnceLock<Mutex<HashMap<u32, CouplingFamily>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().map_err(|_| poisoned())?.get(&n) {
        return Ok(f.clone());
    }
    let family = CouplingFamily::hydrogen_circular(n)?;
    cache
        .lock()
        .map_err(|_| poisoned())?
        .insert(n, family.clone());
    Ok(family)
}

fn poisoned() -> AtlasError {
    AtlasError::Degenerate("hydrogen family cache poisoned".into())
}

/// Standard and nonstandard zero of the continued `F` for one transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydrogenResonances {
    pub transition: HydrogenTransition,
    pub standard: RootResult,
    /// Absent when the coupling vanishes or no pole seed converges, which
    /// happens for large `n` where the pole order is in the hundreds.
    pub nonstandard: Option<RootResult>,
}

/// Locates both zeros of `F₊` for transition `n`.
///
/// The standard zero is seeded at 1. The nonstandard one is the shallowest
/// zero obtained from the pole seeds around `−iμ_n`.
pub fn hydrogen_resonances(n: u32, opts: &EvalOptions) -> Result<HydrogenResonances> {
    let t = transition(n)?;
    resonances_for(t.clone(), t.kappa_n, opts)
}

/// As [`hydrogen_resonances`] with the coupling overridden.
pub fn resonances_for(
    transition: HydrogenTransition,
    kappa: f64,
    opts: &EvalOptions,
) -> Result<HydrogenResonances> {
    let family = transition.family()?;
    let params = transition.params()?.with_kappa(kappa)?;
    let standard = rootfind::newton(
        &params,
        &family,
        Complex64::new(1.0, 0.0),
        &rootfind::NewtonOptions::default(),
        opts,
    )?;
    let nonstandard = if kappa == 0.0 {
        None
    } else {
        let mut best: Option<RootResult> = None;
        for seed in rootfind::pole_seeds(&params, &family, opts)? {
            let Ok(r) = rootfind::newton(
                &params,
                &family,
                seed,
                &rootfind::NewtonOptions::default(),
                opts,
            ) else {
                continue;
            };
            if r.sheet != Sheet::Second || (r.zeta - standard.zeta).norm() < 1e-6 {
                continue;
            }
            if best.as_ref().map_or(true, |b| r.zeta.im > b.zeta.im) {
                best = Some(r);
            }
        }
        best
    };
    Ok(HydrogenResonances {
        transition,
        standard,
        nonstandard,
    })
}

/// Lifetime `τ = ħ / Γ` with total width `Γ = channels · |Im ζ| · ℰ`.
pub fn lifetime_seconds(
    zeta: ComplexEnergy,
    transition: &HydrogenTransition,
    polarization_channels: u32,
) -> Result<f64> {
    if zeta.im >= 0.0 {
        return domain(format!("lifetime needs Im ζ < 0, got {}", zeta.im));
    }
    if polarization_channels == 0 {
        return domain("at least one polarization channel is required");
    }
    let width_ev = polarization_channels as f64 * zeta.im.abs() * transition.level_spacing_ev;
    Ok(HBAR / width_ev)
}
