//! The resolvent function `f(ζ) = ζ − (1+δ) − κ² S(ζ)` with
//! `S(ζ) = ∫₀^∞ ρ(y)/(ζ−y) dy`, its ζ-derivative, and its continuation `f₊`
//! across the positive real axis.
//!
//! Near the cut the transform is evaluated by subtracting `ρ(ζ)` from the
//! integrand and adding back the exact logarithm, so no principal values
//! are ever taken.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, AtlasError, Result};
use crate::family::{CouplingFamily, FamilyKind};
use crate::params::{ensure_finite, ComplexEnergy, ModelParams};
use crate::quadrature::{integrate, integrate_segment, integrate_tail, QuadTol};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How `f₊` is obtained below the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ContinuationMethod {
    /// `f₊ = f + 2πiκ² ρ(ζ)` with the continued density.
    #[default]
    ClosedFormJump,
    /// Integration along a path pushed below ζ.
    DeformedContour,
    /// Both; disagreement beyond `cross_check_tol` is an error.
    CrossChecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub continuation_method: ContinuationMethod,
    /// Smallest `|Im ζ|` at which `f` is evaluated on the positive half-line.
    pub cut_guard: f64,
    pub max_panels: usize,
    pub cross_check_tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            quad_abs_tol: 1e-13,
            continuation_method: ContinuationMethod::ClosedFormJump,
            cut_guard: 1e-9,
            max_panels: 2000,
            cross_check_tol: 1e-8,
        }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.quad_rel_tol) && ok(self.quad_abs_tol) && ok(self.cross_check_tol)) {
            return domain("tolerances must be positive");
        }
        if !(self.cut_guard.is_finite() && self.cut_guard >= 0.0) || self.max_panels == 0 {
            return domain("invalid cut guard or panel budget");
        }
        Ok(())
    }

    fn quad(&self) -> QuadTol {
        QuadTol {
            rel: self.quad_rel_tol,
            abs: self.quad_abs_tol,
            max_panels: self.max_panels,
        }
    }
}

/// Which sheet a value or a zero lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    /// First sheet, the function `f`.
    Physical,
    /// Continuation `f₊` through the positive real axis.
    Second,
}

/// Selector for [`deriv_zeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FnKind {
    F,
    FPlus,
}

/// Which density component a transform integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    Density,
    Slope,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn component(family: &CouplingFamily, mu: f64, z: Complex64, which: Component) -> Complex64 {
    let (v, d) = family.density_c(mu, z);
    match which {
        Component::Density => v,
        Component::Slope => d,
    }
}

/// `∫₀^∞ h(y)/(z−y) dy` on the first sheet, with `Im z = 0` read as the
/// limit from above.
fn half_line_transform(
    family: &CouplingFamily,
    mu: f64,
    z: Complex64,
    which: Component,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let tol = opts.quad();
    let h = |y: f64| component(family, mu, c(y, 0.0), which);
    let mut breaks = family.breakpoints(mu);
    let scale = family.length_scale(mu);
    let top = breaks.last().copied().unwrap_or(1.0).max(z.re).max(1.0);
    let cutoff = top + scale.max(1.0);
    let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
    // Subtraction needs ρ analytic well beyond the distance to the axis.
    let pole_gap = family
        .lower_poles(mu)
        .iter()
        .map(|p| (z - p.at).norm())
        .fold(f64::INFINITY, f64::min);
    let near = dist <= 0.05 * z.norm().max(1.0) && pole_gap > 2.0 * dist;
    if z.re > 0.0 {
        breaks.push(z.re);
        for k in [1.0, 10.0] {
            breaks.push(z.re - k * z.im.abs());
            breaks.push(z.re + k * z.im.abs());
        }
    }

    let tail = integrate_tail(|y| h(y) / (z - y), cutoff, scale, tol)?.value;

    if !near {
        let body = integrate(|y| h(y) / (z - y), 0.0, cutoff, &breaks, tol)?.value;
        return Ok(body + tail);
    }

    let hz = component(family, mu, z, which);
    let body = integrate(
        |y| {
            let d = z - y;
            if d == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                (h(y) - hz) / d
            }
        },
        0.0,
        cutoff,
        &breaks,
        tol,
    )?
    .value;
    // ∫₀ᴸ dy/(z−y) = Log(z/(z−L)), analytic off [0, L].
    let ratio = z / (z - cutoff);
    let log = if ratio.im == 0.0 && ratio.re < 0.0 {
        c(ratio.norm().ln(), PI)
    } else {
        ratio.ln()
    };
    Ok(body + hz * log + tail)
}

/// `S(ζ)` (sheet `Physical`) or its continuation `S₊(ζ) = S(ζ) − 2πi ρ(ζ)`
/// for `Im ζ < 0` (sheet `Second`).
pub fn cauchy_transform(
    family: &CouplingFamily,
    mu: f64,
    zeta: ComplexEnergy,
    sheet: Sheet,
    opts: &EvalOptions,
) -> Result<Complex64> {
    transform(family, mu, zeta, sheet, Component::Density, opts)
}

/// `S'(ζ) = ρ(0)/ζ + ∫₀^∞ ρ'(y)/(ζ−y) dy`, continued like [`cauchy_transform`].
pub fn cauchy_transform_deriv(
    family: &CouplingFamily,
    mu: f64,
    zeta: ComplexEnergy,
    sheet: Sheet,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let rho0 = component(family, mu, c(0.0, 0.0), Component::Density);
    let boundary = if rho0 == c(0.0, 0.0) {
        rho0
    } else {
        rho0 / zeta
    };
    Ok(boundary + transform(family, mu, zeta, sheet, Component::Slope, opts)?)
}

/// `S''(ζ)` from the mean of `S'` over a small circle (Cauchy's formula).
pub fn cauchy_transform_second_deriv(
    family: &CouplingFamily,
    mu: f64,
    zeta: ComplexEnergy,
    sheet: Sheet,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let nearest = family
        .lower_poles(mu)
        .iter()
        .map(|p| (zeta - p.at).norm())
        .fold(zeta.norm(), f64::min);
    let r = 0.25 * nearest;
    let n = 16;
    let mut acc = c(0.0, 0.0);
    for k in 0..n {
        let w = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        let s = cauchy_transform_deriv(family, mu, zeta + r * w, sheet, opts)?;
        acc += s / w;
    }
    Ok(acc / (n as f64 * r))
}

fn transform(
    family: &CouplingFamily,
    mu: f64,
    zeta: Complex64,
    sheet: Sheet,
    which: Component,
    opts: &EvalOptions,
) -> Result<Complex64> {
    let base = half_line_transform(family, mu, zeta, which, opts)?;
    if sheet == Sheet::Second && zeta.im < 0.0 {
        Ok(base - 2.0 * PI * I * component(family, mu, zeta, which))
    } else {
        Ok(base)
    }
}

fn on_cut(zeta: Complex64, guard: f64) -> bool {
    zeta.re >= 0.0 && zeta.im.abs() < guard.max(f64::MIN_POSITIVE)
}

/// A resolvent with the coupling squared allowed to be complex, which
/// complex parameter detours need.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    pub family: &'a CouplingFamily,
    pub mu: f64,
    pub level: f64,
    pub kappa_sq: Complex64,
    pub opts: EvalOptions,
}

impl<'a> Resolvent<'a> {
    pub fn new(params: &ModelParams, family: &'a CouplingFamily, opts: &EvalOptions) -> Self {
        Self {
            family,
            mu: params.mu,
            level: params.level(),
            kappa_sq: c(params.kappa * params.kappa, 0.0),
            opts: *opts,
        }
    }

    fn free(&self) -> bool {
        self.kappa_sq == c(0.0, 0.0)
    }

    /// Value on the requested sheet; the second sheet agrees with the first
    /// for `Im ζ ≥ 0`.
    pub fn value(&self, zeta: Complex64, sheet: Sheet) -> Result<Complex64> {
        ensure_finite(zeta)?;
        if sheet == Sheet::Physical && on_cut(zeta, self.opts.cut_guard) {
            return Err(AtlasError::Cut(zeta));
        }
        if self.free() {
            return Ok(zeta - self.level);
        }
        if sheet == Sheet::Second && zeta.im < 0.0 {
            self.family.check_poles(self.mu, zeta)?;
        }
        let s = cauchy_transform(self.family, self.mu, zeta, sheet, &self.opts)?;
        Ok(zeta - self.level - self.kappa_sq * s)
    }

    pub fn deriv(&self, zeta: Complex64, sheet: Sheet) -> Result<Complex64> {
        ensure_finite(zeta)?;
        if sheet == Sheet::Physical && on_cut(zeta, self.opts.cut_guard) {
            return Err(AtlasError::Cut(zeta));
        }
        if self.free() {
            return Ok(c(1.0, 0.0));
        }
        if sheet == Sheet::Second && zeta.im < 0.0 {
            self.family.check_poles(self.mu, zeta)?;
        }
        let s = cauchy_transform_deriv(self.family, self.mu, zeta, sheet, &self.opts)?;
        Ok(c(1.0, 0.0) - self.kappa_sq * s)
    }
}

/// First-sheet resolvent `f(ζ)`.
pub fn eval_f(
    params: &ModelParams,
    family: &CouplingFamily,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    Resolvent::new(params, family, opts).value(zeta, Sheet::Physical)
}

/// Second-sheet resolvent `f₊(ζ)`; identical to [`eval_f`] for `Im ζ > 0`.
pub fn eval_f_plus(
    params: &ModelParams,
    family: &CouplingFamily,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    if zeta.im >= opts.cut_guard {
        return eval_f(params, family, zeta, opts);
    }
    let jump = || Resolvent::new(params, family, opts).value(zeta, Sheet::Second);
    match opts.continuation_method {
        ContinuationMethod::ClosedFormJump => jump(),
        ContinuationMethod::DeformedContour => {
            if zeta.im >= 0.0 {
                jump()
            } else {
                eval_f_plus_contour(params, family, zeta, opts)
            }
        }
        ContinuationMethod::CrossChecked => {
            let a = jump()?;
            if zeta.im >= 0.0 {
                return Ok(a);
            }
            let b = eval_f_plus_contour(params, family, zeta, opts)?;
            let diff = (a - b).norm();
            if diff > opts.cross_check_tol * a.norm().max(1.0) {
                return Err(AtlasError::Quadrature {
                    value: a.norm(),
                    error: diff,
                });
            }
            Ok(a)
        }
    }
}

/// `f₊` by integrating along `0 → −ih → X−ih → X → ∞`, with the dip `h`
/// halfway between `|Im ζ|` and the shallowest pole of the density.
pub fn eval_f_plus_contour(
    params: &ModelParams,
    family: &CouplingFamily,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    ensure_finite(zeta)?;
    let level = params.level();
    if params.kappa == 0.0 {
        return Ok(zeta - level);
    }
    if zeta.im >= 0.0 {
        return eval_f(params, family, zeta, opts);
    }
    let mu = params.mu;
    let depth = family.strip_depth(mu);
    if zeta.im <= -0.95 * depth || zeta.re <= 0.0 {
        return Err(AtlasError::Strip { zeta, depth });
    }
    let dip = 0.5 * (zeta.im.abs() + depth);
    let bps = family.breakpoints(mu);
    let scale = family.length_scale(mu);
    let x = bps.last().copied().unwrap_or(1.0).max(zeta.re).max(1.0) + scale.max(1.0);
    let tol = opts.quad();
    let g = |y: Complex64| family.density_c(mu, y).0 / (zeta - y);

    let a = c(0.0, 0.0);
    let b = c(0.0, -dip);
    let cc = c(x, -dip);
    let d = c(x, 0.0);
    let mut along: Vec<f64> = bps.iter().map(|p| p / x).collect();
    along.push(zeta.re / x);
    along.push((zeta.re - dip) / x);
    along.push((zeta.re + dip) / x);
    let leg1 = integrate_segment(g, a, b, &[], tol)?.value;
    let leg2 = integrate_segment(g, b, cc, &along, tol)?.value;
    let leg3 = integrate_segment(g, cc, d, &[], tol)?.value;
    let tail = integrate_tail(|y| g(c(y, 0.0)), x, scale, tol)?.value;
    let s = leg1 + leg2 + leg3 + tail;
    Ok(zeta - level - params.kappa * params.kappa * s)
}

/// ζ-derivative of `f` or `f₊`, by differentiating under the integral.
pub fn deriv_zeta(
    kind: FnKind,
    params: &ModelParams,
    family: &CouplingFamily,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    let r = Resolvent::new(params, family, opts);
    match kind {
        FnKind::F => r.deriv(zeta, Sheet::Physical),
        FnKind::FPlus => {
            if zeta.im >= opts.cut_guard {
                r.deriv(zeta, Sheet::Physical)
            } else {
                r.deriv(zeta, Sheet::Second)
            }
        }
    }
}

/// Continued hydrogen resolvent `F₊(ζ) = ζ − 1 − 2κ² ∫ G(y)²/(ζ−μy) dy/y`.
pub fn eval_f_hydrogen(
    n: u32,
    kappa_n: f64,
    mu_n: f64,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    let family = crate::hydrogen::cached_family(n)?;
    let params = ModelParams::new(kappa_n, mu_n, 0.0)?;
    eval_f_plus(&params, &family, zeta, opts)
}

/// Which sign the second rational term of the Lorentzian jump carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JumpConvention {
    /// `4iκ²μ³[(μ²+(ζ−1)²)⁻² + (μ²+(ζ+1)²)⁻²]`, i.e. `2πiκ²ρ(ζ)`.
    Derived,
    /// `4iκ²μ³[(μ²+(ζ−1)²)⁻² − (μ²+(ζ+1)²)⁻²]`.
    AsPrinted,
}

/// The Lorentzian jump `f₊ − f` and its ζ-derivative.
pub fn lorentzian_jump(
    params: &ModelParams,
    zeta: ComplexEnergy,
    convention: JumpConvention,
) -> (ComplexEnergy, ComplexEnergy) {
    let mu = params.mu;
    let k = 4.0 * I * params.kappa * params.kappa * mu.powi(3);
    let sign = match convention {
        JumpConvention::Derived => 1.0,
        JumpConvention::AsPrinted => -1.0,
    };
    let term = |s: f64| {
        let q = mu * mu + (zeta + s) * (zeta + s);
        (1.0 / (q * q), -4.0 * (zeta + s) / (q * q * q))
    };
    let (a, da) = term(-1.0);
    let (b, db) = term(1.0);
    (k * (a + sign * b), k * (da + sign * db))
}

/// `f` plus the jump exactly as printed for the Lorentzian family; kept as a
/// separate path for comparison with [`eval_f_plus`].
pub fn eval_f_plus_as_printed(
    params: &ModelParams,
    zeta: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<ComplexEnergy> {
    let family = CouplingFamily::lorentzian_squared();
    let plus = eval_f_plus(params, &family, zeta, opts)?;
    if zeta.im >= 0.0 {
        return Ok(plus);
    }
    let derived = lorentzian_jump(params, zeta, JumpConvention::Derived).0;
    let printed = lorentzian_jump(params, zeta, JumpConvention::AsPrinted).0;
    Ok(plus - derived + printed)
}

/// First-sheet `f(x)` at real `x < 0` in real arithmetic.
pub fn eval_f_real(
    params: &ModelParams,
    family: &CouplingFamily,
    x: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    if !(x < 0.0 && x.is_finite()) {
        return domain(format!(
            "the real path needs a finite negative argument, got {x}"
        ));
    }
    let level = params.level();
    if params.kappa == 0.0 {
        return Ok(x - level);
    }
    let mu = params.mu;
    let tol = opts.quad();
    let mut breaks = family.breakpoints(mu);
    let mut b = x.abs();
    while b < 1.0 {
        breaks.push(b);
        b *= 10.0;
    }
    let scale = family.length_scale(mu);
    let top = breaks.iter().copied().fold(1.0, f64::max);
    let cutoff = top + scale.max(1.0);
    let g = |y: f64| family.density(mu, y) / (x - y);
    let body = integrate(g, 0.0, cutoff, &breaks, tol)?.value;
    let tail = integrate_tail(g, cutoff, scale, tol)?.value;
    Ok(x - level - params.kappa * params.kappa * (body + tail))
}

/// Exact partial-fraction value of `f` for the Lorentzian family in the
/// upper half-plane.
pub fn residue_closed_form(
    params: &ModelParams,
    family: &CouplingFamily,
    zeta: ComplexEnergy,
) -> Result<ComplexEnergy> {
    if family.kind() != &FamilyKind::LorentzianSquared {
        return domain("the closed form exists only for the Lorentzian-squared family");
    }
    if zeta.im.is_nan() || zeta.im <= 0.0 {
        return domain("the closed form needs Im ζ > 0");
    }
    let level = params.level();
    if params.kappa == 0.0 {
        return Ok(zeta - level);
    }
    let mu = params.mu;
    let s = half_line_closed_form(zeta, mu, 1.0) + half_line_closed_form(zeta, mu, -1.0);
    Ok(zeta - level - 2.0 * params.kappa * params.kappa / (PI * mu) * s)
}

/// `∫₀^∞ W(y)/(z−y) dy` with `W(y) = μ⁴/((y−s)²+μ²)²`, by residues of
/// `R(y)·log(−y)`.
///
/// The residue terms blow up at `z = s + iμ` although their sum does not;
/// close to that point the value is the mean over a circle around `z`.
fn half_line_closed_form(z: Complex64, mu: f64, shift: f64) -> Complex64 {
    let a = c(shift, mu);
    if (z - a).norm() < 0.1 * mu {
        let n = 64;
        return (0..n)
            .map(|k| {
                let w = z + Complex64::from_polar(0.3 * mu, 2.0 * PI * (k as f64 + 0.5) / n as f64);
                half_line_residues(w, mu, shift)
            })
            .sum::<Complex64>()
            / n as f64;
    }
    half_line_residues(z, mu, shift)
}

fn half_line_residues(z: Complex64, mu: f64, shift: f64) -> Complex64 {
    let a = c(shift, mu);
    let ab = c(shift, -mu);
    let m4 = mu.powi(4);
    let w = |y: Complex64| m4 / ((y - a) * (y - a) * (y - ab) * (y - ab));
    let mut total = c(0.0, 0.0);
    for (p, q) in [(a, ab), (ab, a)] {
        let hp = m4 / ((p - q) * (p - q) * (z - p));
        let c2 = hp;
        let c1 = hp * (-2.0 / (p - q) + 1.0 / (z - p));
        total += -c1 * (-p).ln();
        total += c2 / (-p);
    }
    total += w(z) * (-z).ln();
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn lor() -> CouplingFamily {
        CouplingFamily::lorentzian_squared()
    }

    fn opts() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn free_theory_is_linear() {
        let p = make_params(0.0, 0.01, 0.25).unwrap();
        let v = eval_f(&p, &lor(), c(2.0, 1e-3), &opts()).unwrap();
        assert_eq!(v, c(0.75, 1e-3));
        assert_eq!(
            deriv_zeta(FnKind::F, &p, &lor(), c(2.0, 1e-3), &opts()).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn refuses_the_cut() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let r = eval_f(&p, &lor(), c(1.285, -2.7e-10), &opts());
        assert!(matches!(r, Err(AtlasError::Cut(_))));
        assert!(eval_f(&p, &lor(), c(-0.5, 0.0), &opts()).is_ok());
    }

    #[test]
    fn matches_closed_form_oracle() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let z = c(1.5, 0.5);
        let a = eval_f(&p, &lor(), z, &opts()).unwrap();
        let b = residue_closed_form(&p, &lor(), z).unwrap();
        assert!((a - b).norm() <= 1e-10 * b.norm(), "{a} vs {b}");
    }

    #[test]
    fn closed_form_frozen_value() {
        // Half-line sum for μ = 0.01 at 1.5+0.5i from a 40-digit evaluation.
        let z = c(1.5, 0.5);
        let s = half_line_closed_form(z, 0.01, 1.0) + half_line_closed_form(z, 0.01, -1.0);
        let expect = c(0.015_704_823_946_654_616, -0.015_710_982_053_910_096);
        assert!((s - expect).norm() < 1e-15);
    }

    #[test]
    fn closed_form_domain() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        assert!(residue_closed_form(&p, &lor(), c(1.0, -0.1)).is_err());
        assert!(residue_closed_form(&p, &CouplingFamily::simple_pole(), c(1.0, 0.1)).is_err());
    }

    #[test]
    fn upper_half_plane_sheets_agree() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let z = c(0.9, 0.1);
        assert_eq!(
            eval_f(&p, &lor(), z, &opts()).unwrap(),
            eval_f_plus(&p, &lor(), z, &opts()).unwrap()
        );
    }

    #[test]
    fn resonance_pair_is_small_on_second_sheet() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let at = eval_f_plus(&p, &lor(), c(1.285_116_384, -2.687_94e-6), &opts()).unwrap();
        let ph = eval_f_plus(&p, &lor(), c(0.963_016_780_9, -9.806_39e-4), &opts()).unwrap();
        assert!(at.norm() < 1e-8, "{at}");
        assert!(ph.norm() < 1e-8, "{ph}");
    }

    #[test]
    fn jump_matches_density_and_derivative() {
        let p = make_params(0.3, 0.2, 0.25).unwrap();
        let z = c(-0.5, -0.5);
        let (j, dj) = lorentzian_jump(&p, z, JumpConvention::Derived);
        let (rho, drho) = lor().density_c(0.2, z);
        let k2 = 0.09;
        assert!((j - 2.0 * PI * I * k2 * rho).norm() < 1e-12 * j.norm());
        assert!((dj - 2.0 * PI * I * k2 * drho).norm() < 1e-12 * dj.norm());
        let h = 1e-6;
        let fd = (lorentzian_jump(&p, z + h, JumpConvention::AsPrinted).0
            - lorentzian_jump(&p, z - h, JumpConvention::AsPrinted).0)
            / (2.0 * h);
        let d = lorentzian_jump(&p, z, JumpConvention::AsPrinted).1;
        assert!((fd - d).norm() < 1e-7 * d.norm());
    }

    #[test]
    fn contour_strip_limits() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let r = eval_f_plus_contour(&p, &lor(), c(1.0, -0.02), &opts());
        assert!(matches!(r, Err(AtlasError::Strip { .. })));
        let free = make_params(0.0, 0.01, 0.25).unwrap();
        assert_eq!(
            eval_f_plus_contour(&free, &lor(), c(1.0, -0.02), &opts()).unwrap(),
            c(-0.25, -0.02)
        );
    }

    #[test]
    fn contour_agrees_with_jump_in_strip() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        for z in [c(0.99, -0.005), c(1.004, -0.002), c(1.2, -0.004)] {
            let a = eval_f_plus(&p, &lor(), z, &opts()).unwrap();
            let b = eval_f_plus_contour(&p, &lor(), z, &opts()).unwrap();
            assert!((a - b).norm() < 1e-8 * a.norm().max(1.0), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn pole_is_refused() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let r = eval_f_plus(&p, &lor(), c(1.0, -0.01), &opts());
        assert!(matches!(r, Err(AtlasError::Pole { .. })));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let z = c(1.5, 0.5);
        let d = deriv_zeta(FnKind::F, &p, &lor(), z, &opts()).unwrap();
        let h = 1e-6;
        let fd = (eval_f(&p, &lor(), z + h, &opts()).unwrap()
            - eval_f(&p, &lor(), z - h, &opts()).unwrap())
            / (2.0 * h);
        assert!((d - fd).norm() <= 1e-6 * d.norm());
    }

    #[test]
    fn second_derivative_by_circle_mean() {
        let fam = lor();
        let z = c(1.0, -0.004);
        let o = opts();
        let s2 = cauchy_transform_second_deriv(&fam, 0.01, z, Sheet::Second, &o).unwrap();
        let h = 1e-5;
        let fd = (cauchy_transform_deriv(&fam, 0.01, z + h, Sheet::Second, &o).unwrap()
            - cauchy_transform_deriv(&fam, 0.01, z - h, Sheet::Second, &o).unwrap())
            / (2.0 * h);
        assert!((s2 - fd).norm() < 1e-5 * s2.norm(), "{s2} vs {fd}");
    }
}
