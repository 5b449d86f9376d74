//! Zeros of `f` and `f₊`: damped Newton with a Muller fallback, seeded
//! searches for every resonance family, and the negative real eigenvalue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Result};
use crate::family::CouplingFamily;
use crate::params::{ComplexEnergy, ModelParams};
use crate::resolvent::{eval_f_real, EvalOptions, Resolvent};

pub use crate::resolvent::Sheet;

/// Zeros closer than this are the same zero.
pub const DEDUP_RADIUS: f64 = 1e-8;

/// Standard/nonstandard label of a resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Standard,
    Nonstandard,
    Unclassified,
}

/// A located zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootResult {
    pub zeta: ComplexEnergy,
    /// `|f(ζ)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub sheet: Sheet,
    pub label: Option<Label>,
    /// `|f|` after every accepted iterate, starting with the seed.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl RootResult {
    fn new(zeta: Complex64, residual: f64, iterations: usize, history: Vec<f64>) -> Self {
        Self {
            zeta,
            residual,
            iterations,
            sheet: sheet_of(zeta),
            label: None,
            history,
        }
    }
}

fn sheet_of(z: Complex64) -> Sheet {
    if z.im < 0.0 {
        Sheet::Second
    } else {
        Sheet::Physical
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Required `|f|` at the returned zero, relative to `max(1, |ζ|, |κ²S|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Newton steps without sufficient decrease before switching to Muller.
    pub stagnation_limit: usize,
    /// Largest allowed step, relative to `max(1, |ζ|)`.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 60,
            stagnation_limit: 8,
            max_step: 0.5,
        }
    }
}

/// A zero-finding target: the continued resolvent, possibly with complex κ².
pub struct Target<'a> {
    pub resolvent: Resolvent<'a>,
}

impl<'a> Target<'a> {
    pub fn new(params: &ModelParams, family: &'a CouplingFamily, opts: &EvalOptions) -> Self {
        Self {
            resolvent: Resolvent::new(params, family, opts),
        }
    }

    fn guard(&self, z: Complex64) -> Result<()> {
        let r = &self.resolvent;
        if r.kappa_sq == Complex64::new(0.0, 0.0) {
            return Ok(());
        }
        r.family.check_poles(r.mu, z).map_err(|e| match e {
            AtlasError::Pole { pole, .. } => AtlasError::PoleCapture { pole },
            other => other,
        })
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        self.resolvent.value(z, Sheet::Second)
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        self.resolvent.deriv(z, Sheet::Second)
    }

    /// Size of the terms that cancel in `f = ζ − (1+δ) − κ²S`; residuals are
    /// measured against it since near a pole `κ²S` is large.
    pub fn scale(&self, z: Complex64, fz: Complex64) -> f64 {
        let coupled = z - self.resolvent.level - fz;
        1f64.max(z.norm()).max(coupled.norm())
    }

    /// Distance to the nearest pole of the continued density.
    fn pole_distance(&self, z: Complex64) -> f64 {
        let r = &self.resolvent;
        r.family
            .lower_poles(r.mu)
            .iter()
            .map(|p| (z - p.at).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Newton's method on `f₊` from `seed`.
pub fn newton(
    params: &ModelParams,
    family: &CouplingFamily,
    seed: ComplexEnergy,
    nopts: &NewtonOptions,
    opts: &EvalOptions,
) -> Result<RootResult> {
    newton_target(&Target::new(params, family, opts), seed, nopts)
}

/// Newton's method on an explicit target.
pub fn newton_target(
    target: &Target<'_>,
    seed: Complex64,
    nopts: &NewtonOptions,
) -> Result<RootResult> {
    let mut z = seed;
    let mut fz = target.value(z)?;
    let mut history = vec![fz.norm()];
    let mut trail = vec![z];
    let mut ftrail = vec![fz];
    let mut stagnant = 0;
    for it in 1..=nopts.max_iter {
        if fz.norm() <= nopts.tol * target.scale(z, fz) {
            return Ok(RootResult::new(z, fz.norm(), it - 1, history));
        }
        if stagnant >= nopts.stagnation_limit && trail.len() >= 3 {
            let n = trail.len();
            let pts = [trail[n - 3], trail[n - 2], trail[n - 1]];
            let vals = [ftrail[n - 3], ftrail[n - 2], ftrail[n - 1]];
            let mut r = muller_target(target, pts, vals, nopts, it - 1)?;
            let mut h = history;
            h.extend(r.history.iter().skip(1));
            r.history = h;
            return Ok(r);
        }
        let d = target.deriv(z)?;
        let mut step = fz / d;
        // Near a pole |f'| is large and the attainable residual is |f'|·ε|ζ|;
        // a Newton step below tol·|ζ| is then as converged as it gets.
        if step.norm() <= nopts.tol * z.norm().max(1.0) {
            return Ok(RootResult::new(z, fz.norm(), it - 1, history));
        }
        if !step.is_finite() {
            stagnant = nopts.stagnation_limit;
            continue;
        }
        let cap = nopts.max_step * z.norm().max(1.0);
        let near_pole = 0.5 * target.pole_distance(z);
        let limit = cap.min(near_pole.max(1e-300));
        if step.norm() > limit {
            step *= limit / step.norm();
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let cand = z - step * lambda;
            match target.value(cand) {
                Ok(fc) if fc.norm() < fz.norm() => {
                    accepted = Some((cand, fc));
                    break;
                }
                Ok(_) | Err(AtlasError::PoleCapture { .. }) => lambda *= 0.5,
                Err(e) => return Err(e),
            }
        }
        match accepted {
            Some((cand, fc)) => {
                if fc.norm() > 0.5 * fz.norm() {
                    stagnant += 1;
                } else {
                    stagnant = 0;
                }
                z = cand;
                fz = fc;
            }
            None => {
                stagnant = nopts.stagnation_limit;
                let cand = z - step * 1e-2;
                fz = target.value(cand)?;
                z = cand;
            }
        }
        history.push(fz.norm());
        trail.push(z);
        ftrail.push(fz);
    }
    if fz.norm() <= nopts.tol * target.scale(z, fz) {
        return Ok(RootResult::new(z, fz.norm(), nopts.max_iter, history));
    }
    Err(AtlasError::NoConvergence {
        iterations: nopts.max_iter,
        residual: fz.norm(),
        zeta: z,
    })
}

/// Muller's three-point parabola method on `f₊`.
pub fn muller(
    params: &ModelParams,
    family: &CouplingFamily,
    seeds: [ComplexEnergy; 3],
    nopts: &NewtonOptions,
    opts: &EvalOptions,
) -> Result<RootResult> {
    let target = Target::new(params, family, opts);
    let vals = [
        target.value(seeds[0])?,
        target.value(seeds[1])?,
        target.value(seeds[2])?,
    ];
    muller_target(&target, seeds, vals, nopts, 0)
}

fn muller_target(
    target: &Target<'_>,
    pts: [Complex64; 3],
    vals: [Complex64; 3],
    nopts: &NewtonOptions,
    used: usize,
) -> Result<RootResult> {
    let [mut x0, mut x1, mut x2] = pts;
    let [mut f0, mut f1, mut f2] = vals;
    let mut history = vec![f2.norm()];
    let one = Complex64::new(1.0, 0.0);
    for it in used + 1..=nopts.max_iter.max(used + 1) {
        if f2.norm() <= nopts.tol * target.scale(x2, f2) {
            return Ok(RootResult::new(x2, f2.norm(), it - 1, history));
        }
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        if h1.norm() == 0.0 || h2.norm() == 0.0 || (h1 + h2).norm() == 0.0 {
            // Degenerate stencil: spread the points and retry.
            let s = 1e-6 * x2.norm().max(1.0);
            x0 = x2 - s;
            x1 = x2 + Complex64::new(0.0, s);
            f0 = target.value(x0)?;
            f1 = target.value(x1)?;
            continue;
        }
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * f2).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        let mut dx = if den.norm() == 0.0 {
            one * 1e-3 * x2.norm().max(1.0)
        } else {
            -2.0 * f2 / den
        };
        let limit = (nopts.max_step * x2.norm().max(1.0)).min(0.5 * target.pole_distance(x2));
        if dx.norm() > limit {
            dx *= limit / dx.norm();
        }
        let x3 = x2 + dx;
        let f3 = target.value(x3)?;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = f3;
        history.push(f2.norm());
    }
    if f2.norm() <= nopts.tol * target.scale(x2, f2) {
        return Ok(RootResult::new(x2, f2.norm(), nopts.max_iter, history));
    }
    Err(AtlasError::NoConvergence {
        iterations: nopts.max_iter,
        residual: f2.norm(),
        zeta: x2,
    })
}

/// Which seeds [`find_all`] tries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedStrategy {
    /// The bare level `1+δ`.
    pub atomic: bool,
    /// The zero-width dressed energies.
    pub dressed: bool,
    /// Laurent seeds around each lower pole of the continued density.
    pub poles: bool,
    /// Bisection for a real zero below 0.
    pub negative_real: bool,
    pub extra: Vec<ComplexEnergy>,
}

impl Default for SeedStrategy {
    fn default() -> Self {
        Self {
            atomic: true,
            dressed: true,
            poles: true,
            negative_real: true,
            extra: Vec::new(),
        }
    }
}

/// Seeds from the leading Laurent term of the jump at each lower pole `p`
/// of order `m`: `(ζ−p)^m = −2πiκ² c_m / f(p)`.
pub fn pole_seeds(
    params: &ModelParams,
    family: &CouplingFamily,
    opts: &EvalOptions,
) -> Result<Vec<ComplexEnergy>> {
    let mu = params.mu;
    let k2 = params.kappa * params.kappa;
    if k2 == 0.0 {
        return Ok(Vec::new());
    }
    let poles = family.lower_poles(mu);
    let mut all: Vec<Complex64> = poles.iter().map(|p| p.at).collect();
    all.extend(poles.iter().map(|p| p.at.conj()));
    let resolvent = Resolvent::new(params, family, opts);
    let mut seeds = Vec::new();
    for p in &poles {
        if p.at.re < 0.0 {
            continue;
        }
        let gap = all
            .iter()
            .filter(|q| (**q - p.at).norm() > 0.0)
            .map(|q| (q - p.at).norm())
            .fold(f64::INFINITY, f64::min);
        let r = 0.5 * gap.min(p.at.norm().max(mu));
        let n = 32;
        let m = p.order as i32;
        let mut coeff = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let w = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
            coeff += w.powi(m) * family.density_c(mu, p.at + w).0;
        }
        coeff /= n as f64;
        let fp = resolvent.value(p.at, Sheet::Physical)?;
        let rhs = -2.0 * std::f64::consts::PI * Complex64::i() * k2 * coeff / fp;
        let base = rhs.powf(1.0 / m as f64);
        for j in 0..m {
            let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            seeds.push(p.at + base * rot);
        }
    }
    Ok(seeds)
}

fn push_unique(out: &mut Vec<RootResult>, r: RootResult) {
    if out.iter().all(|o| (o.zeta - r.zeta).norm() >= DEDUP_RADIUS) {
        out.push(r);
    }
}

/// Every zero reachable from the seeds in `strategy`, deduplicated and
/// ordered by real part.
pub fn find_all(
    params: &ModelParams,
    family: &CouplingFamily,
    strategy: &SeedStrategy,
    opts: &EvalOptions,
) -> Result<Vec<RootResult>> {
    let level = params.level();
    if params.kappa == 0.0 {
        return Ok(vec![RootResult {
            label: Some(Label::Standard),
            ..RootResult::new(Complex64::new(level, 0.0), 0.0, 0, vec![0.0])
        }]);
    }
    let mut seeds = Vec::new();
    if strategy.atomic {
        seeds.push(Complex64::new(level, 0.0));
    }
    if strategy.dressed {
        let d = params.delta;
        let root = (d * d + 4.0 * params.kappa * params.kappa).sqrt();
        seeds.push(Complex64::new(1.0 + 0.5 * (d - root), 0.0));
        seeds.push(Complex64::new(1.0 + 0.5 * (d + root), 0.0));
    }
    if strategy.poles {
        seeds.extend(pole_seeds(params, family, opts)?);
    }
    seeds.extend(strategy.extra.iter().copied());

    let nopts = NewtonOptions::default();
    let found: Vec<Option<RootResult>> = {
        use rayon::prelude::*;
        seeds
            .par_iter()
            .map(|s| newton(params, family, *s, &nopts, opts).ok())
            .collect()
    };
    let mut out = Vec::new();
    for r in found.into_iter().flatten() {
        push_unique(&mut out, r);
    }
    if strategy.negative_real {
        if let Some(x) = negative_real_eigenvalue(params, family, opts)? {
            let z = Complex64::new(x, 0.0);
            let residual = eval_f_real(params, family, x, opts)?.abs();
            push_unique(&mut out, RootResult::new(z, residual, 0, vec![residual]));
        }
    }
    out.sort_by(|a, b| a.zeta.re.total_cmp(&b.zeta.re));
    Ok(out)
}

/// Bracket used when searching for a real zero below 0.
pub const NEGATIVE_BRACKET: (f64, f64) = (-1e3, -1e-12);

/// The real zero of `f` on `(−∞, 0)`, if any.
///
/// `f` is strictly increasing there (its derivative is `1 + κ²∫ρ/(x−y)²`),
/// so a zero exists in the bracket iff `f` changes sign across it.
pub fn negative_real_eigenvalue(
    params: &ModelParams,
    family: &CouplingFamily,
    opts: &EvalOptions,
) -> Result<Option<f64>> {
    if params.kappa == 0.0 {
        return Ok(None);
    }
    let (lo, hi) = NEGATIVE_BRACKET;
    let f = |x: f64| eval_f_real(params, family, x, opts);
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo > 0.0 || fhi < 0.0 {
        return Ok(None);
    }
    // Bisect in log|x| first (the root may sit anywhere over 15 decades),
    // then linearly.
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = if a / b > 4.0 {
            -(a * b).sqrt()
        } else {
            0.5 * (a + b)
        };
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs() {
            break;
        }
    }
    Ok(Some(0.5 * (a + b)))
}
