//! Predictor-corrector tracking of zeros along parameter paths,
//! standard/nonstandard classification, the exceptional point where two
//! resonances merge, and the weak/strong regime test.

use std::fmt;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Result};
use crate::family::CouplingFamily;
use crate::params::{ComplexEnergy, ModelParams};
use crate::resolvent::{
    cauchy_transform, cauchy_transform_deriv, cauchy_transform_second_deriv, EvalOptions, Sheet,
};
use crate::rootfind::{
    find_all, newton_target, Label, NewtonOptions, RootResult, SeedStrategy, Target, DEDUP_RADIUS,
};

/// The real parameter a trajectory varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    Kappa,
    Mu,
    Delta,
}

impl Vary {
    pub fn name(self) -> &'static str {
        match self {
            Vary::Kappa => "kappa",
            Vary::Mu => "mu",
            Vary::Delta => "delta",
        }
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            Vary::Kappa => p.kappa,
            Vary::Mu => p.mu,
            Vary::Delta => p.delta,
        }
    }

    pub fn set(self, p: &ModelParams, value: f64) -> Result<ModelParams> {
        match self {
            Vary::Kappa => p.with_kappa(value),
            Vary::Mu => p.with_mu(value),
            Vary::Delta => p.with_delta(value),
        }
    }
}

impl fmt::Display for Vary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Vary {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Vary::Kappa),
            "mu" => Ok(Vary::Mu),
            "delta" => Ok(Vary::Delta),
            other => Err(AtlasError::Domain(format!(
                "unknown parameter {other:?}, expected kappa, mu or delta"
            ))),
        }
    }
}

/// A tracked branch of zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub param_name: Vary,
    /// Strictly monotone parameter values with the zero at each.
    pub samples: Vec<(f64, RootResult)>,
    /// False when tracking stopped before the requested end.
    pub continuity_ok: bool,
}

impl Trajectory {
    pub fn last(&self) -> &RootResult {
        &self.samples.last().expect("a trajectory holds its seed").1
    }

    pub fn end_param(&self) -> f64 {
        self.samples.last().expect("a trajectory holds its seed").0
    }
}

/// A trajectory in complex κ, parametrized by arc length along the polyline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexTrajectory {
    pub kappa: Vec<Complex64>,
    pub zeros: Vec<RootResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    pub newton: NewtonOptions,
    /// Accepted jumps satisfy `|Δζ| ≤ min(cap, factor·|Δp|·slope)`.
    pub continuity_factor: f64,
    pub continuity_cap: f64,
    /// Smallest step, relative to the nominal one, before giving up.
    pub min_step_ratio: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions {
                max_iter: 30,
                ..NewtonOptions::default()
            },
            continuity_factor: 50.0,
            continuity_cap: 0.2,
            min_step_ratio: 1e-9,
        }
    }
}

/// Tracking stopped early; the samples before the loss are kept.
#[derive(Debug, Clone)]
pub struct Partial<T> {
    pub done: T,
    pub lost: Option<AtlasError>,
}

impl<T> Partial<T> {
    pub fn into_result(self) -> Result<T> {
        match self.lost {
            None => Ok(self.done),
            Some(e) => Err(e),
        }
    }
}

enum Path<'a> {
    Real {
        base: ModelParams,
        vary: Vary,
    },
    Kappa {
        base: ModelParams,
        nodes: &'a [Complex64],
        lengths: Vec<f64>,
    },
}

impl Path<'_> {
    fn target<'f>(
        &self,
        family: &'f CouplingFamily,
        s: f64,
        opts: &EvalOptions,
    ) -> Result<Target<'f>> {
        match self {
            Path::Real { base, vary } => Ok(Target::new(&vary.set(base, s)?, family, opts)),
            Path::Kappa { base, .. } => {
                let k = self.kappa_at(s);
                let mut t = Target::new(base, family, opts);
                t.resolvent.kappa_sq = k * k;
                Ok(t)
            }
        }
    }

    fn kappa_at(&self, s: f64) -> Complex64 {
        let Path::Kappa { nodes, lengths, .. } = self else {
            unreachable!("only complex paths have a κ polyline")
        };
        let j = lengths
            .partition_point(|l| *l <= s)
            .clamp(1, nodes.len() - 1);
        let span = lengths[j] - lengths[j - 1];
        let t = if span > 0.0 {
            (s - lengths[j - 1]) / span
        } else {
            0.0
        };
        nodes[j - 1] + (nodes[j] - nodes[j - 1]) * t
    }
}

struct Engine<'a, 'f> {
    path: Path<'a>,
    family: &'f CouplingFamily,
    opts: EvalOptions,
    topts: TrackOptions,
}

impl Engine<'_, '_> {
    /// `dζ/ds = −∂ₛf/∂ζf` by a one-sided difference towards `s + ds`.
    fn tangent(&self, s: f64, ds: f64, z: Complex64) -> Result<Complex64> {
        let here = self.path.target(self.family, s, &self.opts)?;
        let there = self.path.target(self.family, s + ds, &self.opts)?;
        let fs = (there.value(z)? - here.value(z)?) / ds;
        let fz = here.deriv(z)?;
        Ok(-fs / fz)
    }

    fn correct(&self, s: f64, seed: Complex64) -> Result<RootResult> {
        let t = self.path.target(self.family, s, &self.opts)?;
        newton_target(&t, seed, &self.topts.newton)
    }

    /// Tracks all `zeros` together through `grid` (whose first entry is the
    /// start). Every branch shares the step; a step is accepted only when
    /// every branch passes the continuity test and stays nearer its own
    /// prediction than to any other.
    fn run(&self, grid: &[f64], zeros: &[Complex64]) -> Partial<Vec<Vec<(f64, RootResult)>>> {
        let mut out: Vec<Vec<(f64, RootResult)>> = vec![Vec::new(); zeros.len()];
        let s0 = grid[0];
        for (k, z) in zeros.iter().enumerate() {
            match self.correct(s0, *z) {
                Ok(r) => out[k].push((s0, r)),
                Err(e) => {
                    return Partial {
                        done: out,
                        lost: Some(e),
                    }
                }
            }
        }
        let mut s = s0;
        let mut prev: Option<(f64, Vec<Complex64>)> = None;
        for w in grid.windows(2) {
            let (_, target) = (w[0], w[1]);
            let nominal = target - s;
            if nominal == 0.0 {
                continue;
            }
            let mut h = nominal;
            while s != target {
                let remaining = target - s;
                let step = if h.abs() >= remaining.abs() * (1.0 - 1e-12) {
                    remaining
                } else {
                    h
                };
                let s_new = if step == remaining { target } else { s + step };
                let current: Vec<Complex64> =
                    out.iter().map(|b| b.last().unwrap().1.zeta).collect();
                match self.attempt(s, s_new, &current, prev.as_ref(), nominal) {
                    Ok(Some(roots)) => {
                        prev = Some((s, current));
                        for (b, r) in out.iter_mut().zip(roots) {
                            b.push((s_new, r));
                        }
                        s = s_new;
                        h = if (2.0 * step).abs() < nominal.abs() {
                            2.0 * step
                        } else {
                            nominal
                        };
                    }
                    Ok(None) | Err(_) => {
                        h = 0.5 * step;
                        if h.abs() < self.topts.min_step_ratio * nominal.abs() {
                            return Partial {
                                done: out,
                                lost: Some(AtlasError::TrackingLost { param: s }),
                            };
                        }
                    }
                }
            }
        }
        Partial {
            done: out,
            lost: None,
        }
    }

    fn attempt(
        &self,
        s: f64,
        s_new: f64,
        current: &[Complex64],
        prev: Option<&(f64, Vec<Complex64>)>,
        nominal: f64,
    ) -> Result<Option<Vec<RootResult>>> {
        let step = s_new - s;
        let probe = 1e-6 * nominal;
        let mut preds = Vec::with_capacity(current.len());
        let mut slopes = Vec::with_capacity(current.len());
        for (k, z) in current.iter().enumerate() {
            let tangent = self.tangent(s, probe, *z)?;
            let secant = prev.map(|(sp, zp)| (z - zp[k]) / (s - sp));
            let slope = secant.unwrap_or(tangent);
            preds.push(z + slope * step);
            slopes.push(tangent.norm().max(secant.map_or(0.0, |v| v.norm())));
        }
        let mut roots = Vec::with_capacity(current.len());
        for (k, pred) in preds.iter().enumerate() {
            let r = self.correct(s_new, *pred)?;
            // Difference back towards s, which is known to be valid.
            let slope_new = self.tangent(s_new, -probe, r.zeta);
            let slope = slope_new.map_or(slopes[k], |v| v.norm().max(slopes[k]));
            let bound = (self.topts.continuity_factor * step.abs() * slope)
                .min(self.topts.continuity_cap)
                + 1e-12 * (1.0 + current[k].norm());
            if (r.zeta - current[k]).norm() > bound {
                return Ok(None);
            }
            let own = (r.zeta - pred).norm();
            for (j, other) in preds.iter().enumerate() {
                if j != k && own > 0.3 * (other - pred).norm() {
                    return Ok(None);
                }
            }
            roots.push(r);
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if (roots[i].zeta - roots[j].zeta).norm() < DEDUP_RADIUS {
                    return Ok(None);
                }
            }
        }
        Ok(Some(roots))
    }
}

/// Evenly spaced parameter values from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|j| {
            if j == steps {
                stop
            } else {
                start + (stop - start) * j as f64 / steps as f64
            }
        })
        .collect()
}

/// Geometrically spaced values from `start` to `stop` (same sign) inclusive.
pub fn geometric_grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    let ratio = (stop / start).powf(1.0 / steps as f64);
    (0..=steps)
        .map(|j| {
            if j == steps {
                stop
            } else {
                start * ratio.powi(j as i32)
            }
        })
        .collect()
}

/// Tracks `zero0` while `vary` moves linearly from its value in `params0`
/// to `stop` in `steps` nominal steps.
pub fn track(
    params0: &ModelParams,
    family: &CouplingFamily,
    vary: Vary,
    stop: f64,
    steps: usize,
    zero0: ComplexEnergy,
    opts: &EvalOptions,
) -> Result<Trajectory> {
    let grid = linear_grid(vary.get(params0), stop, steps);
    track_grid(
        params0,
        family,
        vary,
        &grid,
        zero0,
        &TrackOptions::default(),
        opts,
    )
    .into_result()
}

/// Tracks `zero0` through the parameter values in `grid`; the first entry
/// replaces the value in `params0`. On loss the samples so far are returned
/// together with the error.
pub fn track_grid(
    params0: &ModelParams,
    family: &CouplingFamily,
    vary: Vary,
    grid: &[f64],
    zero0: ComplexEnergy,
    topts: &TrackOptions,
    opts: &EvalOptions,
) -> Partial<Trajectory> {
    let p = track_many(params0, family, vary, grid, &[zero0], topts, opts);
    Partial {
        done: p.done.into_iter().next().expect("one branch was tracked"),
        lost: p.lost,
    }
}

/// Tracks several zeros together with a shared step, which prevents two
/// nearby branches from swapping.
pub fn track_many(
    params0: &ModelParams,
    family: &CouplingFamily,
    vary: Vary,
    grid: &[f64],
    zeros: &[ComplexEnergy],
    topts: &TrackOptions,
    opts: &EvalOptions,
) -> Partial<Vec<Trajectory>> {
    let strictly_monotone =
        grid.windows(2).all(|w| w[1] > w[0]) || grid.windows(2).all(|w| w[1] < w[0]);
    if grid.len() < 2 || !strictly_monotone {
        return Partial {
            done: Vec::new(),
            lost: Some(AtlasError::Domain(
                "a tracking grid needs at least two strictly monotone values".into(),
            )),
        };
    }
    let engine = Engine {
        path: Path::Real {
            base: *params0,
            vary,
        },
        family,
        opts: *opts,
        topts: *topts,
    };
    let run = engine.run(grid, zeros);
    let ok = run.lost.is_none();
    Partial {
        done: run
            .done
            .into_iter()
            .map(|samples| Trajectory {
                param_name: vary,
                samples,
                continuity_ok: ok,
            })
            .collect(),
        lost: run.lost,
    }
}

/// Tracks a zero while κ runs along a polyline in the complex plane, with
/// `steps_per_segment` nominal steps on each leg. `params.kappa` is ignored.
pub fn track_complex_kappa(
    params: &ModelParams,
    family: &CouplingFamily,
    nodes: &[Complex64],
    steps_per_segment: usize,
    zero0: ComplexEnergy,
    topts: &TrackOptions,
    opts: &EvalOptions,
) -> Partial<ComplexTrajectory> {
    let mut lengths = vec![0.0];
    for w in nodes.windows(2) {
        lengths.push(lengths.last().unwrap() + (w[1] - w[0]).norm());
    }
    let empty = ComplexTrajectory {
        kappa: Vec::new(),
        zeros: Vec::new(),
    };
    if nodes.len() < 2 || lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Partial {
            done: empty,
            lost: Some(AtlasError::Domain(
                "a κ polyline needs at least two distinct consecutive nodes".into(),
            )),
        };
    }
    let mut grid = vec![0.0];
    for w in lengths.windows(2) {
        grid.extend(
            linear_grid(w[0], w[1], steps_per_segment)
                .into_iter()
                .skip(1),
        );
    }
    let engine = Engine {
        path: Path::Kappa {
            base: *params,
            nodes,
            lengths,
        },
        family,
        opts: *opts,
        topts: *topts,
    };
    let run = engine.run(&grid, &[zero0]);
    let branch = run.done.into_iter().next().unwrap_or_default();
    Partial {
        done: ComplexTrajectory {
            kappa: branch
                .iter()
                .map(|(s, _)| engine.path.kappa_at(*s))
                .collect(),
            zeros: branch.into_iter().map(|(_, r)| r).collect(),
        },
        lost: run.lost,
    }
}

/// Ratio of the geometric κ ladder used by [`classify`].
pub const LADDER_RATIO: f64 = 0.7;
/// The ladder stops at the first rung below this coupling.
pub const LADDER_FLOOR: f64 = 1e-5;
/// Distance from `1+δ` within which a κ → 0 limit counts as standard.
pub const STANDARD_RADIUS: f64 = 1e-4;

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub label: Label,
    /// The zero at the last rung of the ladder.
    pub limit: ComplexEnergy,
    pub trajectory: Trajectory,
}

/// Follows `zero` as κ decreases geometrically towards 0 and labels it
/// `Standard` when it ends within [`STANDARD_RADIUS`] of `1+δ`. `steps` is
/// the number of nominal steps per rung.
pub fn classify(
    params: &ModelParams,
    family: &CouplingFamily,
    zero: &RootResult,
    steps: usize,
    opts: &EvalOptions,
) -> Result<Classification> {
    if params.kappa == 0.0 {
        let label = if (zero.zeta - params.level()).norm() <= STANDARD_RADIUS {
            Label::Standard
        } else {
            Label::Nonstandard
        };
        return Ok(Classification {
            label,
            limit: zero.zeta,
            trajectory: Trajectory {
                param_name: Vary::Kappa,
                samples: vec![(0.0, zero.clone())],
                continuity_ok: true,
            },
        });
    }
    let mut rungs = vec![params.kappa];
    while *rungs.last().unwrap() >= LADDER_FLOOR {
        let next = rungs.last().unwrap() * LADDER_RATIO;
        rungs.push(next);
    }
    let mut grid = vec![rungs[0]];
    for w in rungs.windows(2) {
        grid.extend(geometric_grid(w[0], w[1], steps.max(1)).into_iter().skip(1));
    }
    let trajectory = track_grid(
        params,
        family,
        Vary::Kappa,
        &grid,
        zero.zeta,
        &TrackOptions::default(),
        opts,
    )
    .into_result()?;
    let limit = trajectory.last().zeta;
    let label = if (limit - params.level()).norm() <= STANDARD_RADIUS {
        Label::Standard
    } else {
        Label::Nonstandard
    };
    Ok(Classification {
        label,
        limit,
        trajectory,
    })
}

/// [`classify`] that records a lost track as `Unclassified`.
pub fn label_of(
    params: &ModelParams,
    family: &CouplingFamily,
    zero: &RootResult,
    steps: usize,
    opts: &EvalOptions,
) -> Label {
    classify(params, family, zero, steps, opts).map_or(Label::Unclassified, |c| c.label)
}

/// Two resonances merging at a double zero of `f₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalPoint {
    pub kappa_c: f64,
    pub delta_c: f64,
    pub zeta_c: ComplexEnergy,
    pub mu: f64,
    /// `(|f₊|, |∂ζ f₊|)` at the solution.
    pub condition_residuals: (f64, f64),
    pub iterations: usize,
}

/// Starting point for [`critical_coupling`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpGuess {
    pub kappa: f64,
    pub delta: f64,
    pub zeta: ComplexEnergy,
}

impl EpGuess {
    /// `κ = 0.3μ`, `δ = 0`, `ζ = 1 − 0.382iμ`.
    pub fn default_for(mu: f64) -> Self {
        Self {
            kappa: 0.3 * mu,
            delta: 0.0,
            zeta: Complex64::new(1.0, -0.382 * mu),
        }
    }
}

/// Required size of both residuals at the exceptional point.
pub const EP_TOL: f64 = 1e-10;

fn ep_system(
    family: &CouplingFamily,
    mu: f64,
    x: &Vector4<f64>,
    opts: &EvalOptions,
) -> Result<(Vector4<f64>, Matrix4<f64>)> {
    let zeta = Complex64::new(x[0], x[1]);
    let (kappa, delta) = (x[2], x[3]);
    family.check_poles(mu, zeta)?;
    let s = cauchy_transform(family, mu, zeta, Sheet::Second, opts)?;
    let s1 = cauchy_transform_deriv(family, mu, zeta, Sheet::Second, opts)?;
    let s2 = cauchy_transform_second_deriv(family, mu, zeta, Sheet::Second, opts)?;
    let k2 = kappa * kappa;
    let f = zeta - 1.0 - delta - k2 * s;
    let g = 1.0 - k2 * s1;
    let i = Complex64::i();
    // Columns: ∂/∂Re ζ, ∂/∂Im ζ, ∂/∂κ, ∂/∂δ for f and g = ∂ζ f.
    let df = [g, i * g, -2.0 * kappa * s, Complex64::new(-1.0, 0.0)];
    let dg = [
        -k2 * s2,
        -i * k2 * s2,
        -2.0 * kappa * s1,
        Complex64::new(0.0, 0.0),
    ];
    let mut jac = Matrix4::zeros();
    for col in 0..4 {
        jac[(0, col)] = df[col].re;
        jac[(1, col)] = df[col].im;
        jac[(2, col)] = dg[col].re;
        jac[(3, col)] = dg[col].im;
    }
    Ok((Vector4::new(f.re, f.im, g.re, g.im), jac))
}

/// Solves `f₊(ζ) = 0`, `∂ζ f₊(ζ) = 0` for `(Re ζ, Im ζ, κ, δ)` at fixed μ by
/// damped Newton.
pub fn critical_coupling(
    mu: f64,
    family: &CouplingFamily,
    init: Option<EpGuess>,
    opts: &EvalOptions,
) -> Result<ExceptionalPoint> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(AtlasError::Domain(format!("mu must be positive, got {mu}")));
    }
    let guess = init.unwrap_or_else(|| EpGuess::default_for(mu));
    let mut x = Vector4::new(guess.zeta.re, guess.zeta.im, guess.kappa, guess.delta);
    let (mut r, mut jac) = ep_system(family, mu, &x, opts)?;
    let max_iter = 60;
    for it in 0..max_iter {
        if r[0].hypot(r[1]) <= EP_TOL && r[2].hypot(r[3]) <= EP_TOL {
            return Ok(ExceptionalPoint {
                kappa_c: x[2].abs(),
                delta_c: x[3],
                zeta_c: Complex64::new(x[0], x[1]),
                mu,
                condition_residuals: (r[0].hypot(r[1]), r[2].hypot(r[3])),
                iterations: it,
            });
        }
        let step = jac.lu().solve(&(-r)).ok_or(AtlasError::NoConvergence {
            iterations: it,
            residual: r.norm(),
            zeta: Complex64::new(x[0], x[1]),
        })?;
        // Keep ζ below the axis and away from the poles: cap the ζ move.
        let zmove = step[0].hypot(step[1]);
        let cap = 0.5 * x[1].abs().max(1e-3 * mu);
        let mut lambda = if zmove > cap { cap / zmove } else { 1.0 };
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial = x + step * lambda;
            if let Ok((rt, jt)) = ep_system(family, mu, &trial, opts) {
                if rt.norm() < (1.0 - 1e-4 * lambda) * r.norm() {
                    x = trial;
                    r = rt;
                    jac = jt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(AtlasError::NoConvergence {
                iterations: it,
                residual: r.norm(),
                zeta: Complex64::new(x[0], x[1]),
            });
        }
    }
    Err(AtlasError::NoConvergence {
        iterations: max_iter,
        residual: r.norm(),
        zeta: Complex64::new(x[0], x[1]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    StrongCoupling,
    WeakCoupling,
}

/// Outcome of [`regime_diagnose`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// The two zeros that start nearest to the dressed energies, tracked over
    /// the δ range; the first starts as the lower-energy one.
    pub branches: [Trajectory; 2],
    /// Smallest `|Re ζ₁ − Re ζ₂|` over the sweep.
    pub min_real_gap: f64,
    /// Smallest `|Im ζ₁ − Im ζ₂|` over the sweep.
    pub min_imag_gap: f64,
}

/// Sweeps δ over `delta_range` tracking the pair of resonances born from the
/// dressed energies. Real parts that keep a strictly positive gap mean
/// strong coupling; real parts that cross while the imaginary parts stay
/// apart mean weak coupling.
pub fn regime_diagnose(
    params: &ModelParams,
    family: &CouplingFamily,
    delta_range: (f64, f64),
    steps: usize,
    opts: &EvalOptions,
) -> Result<RegimeReport> {
    let (d0, d1) = delta_range;
    let start = params.with_delta(d0)?;
    let pair = resonance_pair(&start, family, opts)?;
    let grid = linear_grid(d0, d1, steps);
    let tracked = track_many(
        &start,
        family,
        Vary::Delta,
        &grid,
        &pair,
        &TrackOptions::default(),
        opts,
    );
    let param = tracked.done.first().map_or(d0, |t| t.end_param());
    match tracked.lost {
        None => {}
        Some(AtlasError::TrackingLost { .. }) => {
            return Err(AtlasError::DegenerateRegime { param })
        }
        Some(e) => return Err(e),
    }
    let [a, b]: [Trajectory; 2] = tracked.done.try_into().expect("two branches were tracked");
    let mut min_real = f64::INFINITY;
    let mut min_imag = f64::INFINITY;
    let mut sign = 0.0f64;
    let mut crossed = false;
    for ((p, ra), (_, rb)) in a.samples.iter().zip(&b.samples) {
        let d = rb.zeta - ra.zeta;
        if d.norm() < DEDUP_RADIUS {
            return Err(AtlasError::DegenerateRegime { param: *p });
        }
        min_real = min_real.min(d.re.abs());
        min_imag = min_imag.min(d.im.abs());
        if d.re != 0.0 {
            if sign != 0.0 && d.re.signum() != sign {
                crossed = true;
            }
            sign = d.re.signum();
        } else {
            crossed = true;
        }
    }
    let regime = if crossed {
        if min_imag < DEDUP_RADIUS {
            return Err(AtlasError::DegenerateRegime {
                param: params.kappa,
            });
        }
        Regime::WeakCoupling
    } else {
        Regime::StrongCoupling
    };
    Ok(RegimeReport {
        regime,
        branches: [a, b],
        min_real_gap: min_real,
        min_imag_gap: min_imag,
    })
}

/// The two second-sheet zeros nearest the zero-width dressed energies,
/// ordered by real part.
pub fn resonance_pair(
    params: &ModelParams,
    family: &CouplingFamily,
    opts: &EvalOptions,
) -> Result<[ComplexEnergy; 2]> {
    let d = params.delta;
    let root = (d * d + 4.0 * params.kappa * params.kappa).sqrt();
    let dressed = [1.0 + 0.5 * (d - root), 1.0 + 0.5 * (d + root)];
    let strategy = SeedStrategy {
        negative_real: false,
        ..SeedStrategy::default()
    };
    let zeros: Vec<Complex64> = find_all(params, family, &strategy, opts)?
        .into_iter()
        .filter(|r| r.zeta.im < 0.0)
        .map(|r| r.zeta)
        .collect();
    let mut chosen: Vec<Complex64> = Vec::new();
    for e in dressed {
        let best = zeros
            .iter()
            .filter(|z| chosen.iter().all(|c| (*c - **z).norm() >= DEDUP_RADIUS))
            .min_by(|a, b| (**a - e).norm().total_cmp(&(**b - e).norm()))
            .copied();
        match best {
            Some(z) => chosen.push(z),
            None => {
                return Err(AtlasError::Degenerate(
                    "fewer than two resonances near the dressed energies".into(),
                ))
            }
        }
    }
    chosen.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok([chosen[0], chosen[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::rootfind::newton;

    fn lor() -> CouplingFamily {
        CouplingFamily::lorentzian_squared()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eo() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn grids_hit_both_ends() {
        let g = linear_grid(0.01, 1.0, 7);
        assert_eq!((g[0], g[7]), (0.01, 1.0));
        let g = geometric_grid(0.1, 1e-5, 4);
        assert_eq!(g[4], 1e-5);
        assert!((g[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn vary_round_trips_through_strings() {
        for v in [Vary::Kappa, Vary::Mu, Vary::Delta] {
            assert_eq!(v.name().parse::<Vary>().unwrap(), v);
        }
        assert!("lambda".parse::<Vary>().is_err());
    }

    #[test]
    fn delta_track_of_free_zero_is_exact() {
        let p = make_params(0.0, 0.01, 0.0).unwrap();
        let t = track(&p, &lor(), Vary::Delta, 0.5, 5, c(1.0, 0.0), &eo()).unwrap();
        assert!((t.last().zeta - c(1.5, 0.0)).norm() < 1e-14);
        assert!(t.continuity_ok);
    }

    #[test]
    fn reversal_returns_to_start() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let z0 = c(1.285_116_384, -2.687_94e-6);
        let fwd = track(&p, &lor(), Vary::Mu, 0.05, 20, z0, &eo()).unwrap();
        let q = p.with_mu(0.05).unwrap();
        let back = track(&q, &lor(), Vary::Mu, 0.01, 20, fwd.last().zeta, &eo()).unwrap();
        assert!((back.last().zeta - fwd.samples[0].1.zeta).norm() < 1e-8);
        assert!(fwd.samples.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn exceptional_point_at_small_width() {
        let ep = critical_coupling(0.01, &lor(), None, &eo()).unwrap();
        assert!((ep.kappa_c - 0.003_002_831_059_57).abs() < 1e-11, "{ep:?}");
        assert!(ep.delta_c.abs() < 1e-9);
        assert!((ep.zeta_c - c(1.0, -0.003_819_660_113_16)).norm() < 1e-9);
        assert!(ep.condition_residuals.0 <= EP_TOL && ep.condition_residuals.1 <= EP_TOL);
    }

    #[test]
    fn critical_coupling_rejects_bad_width() {
        assert!(critical_coupling(-1.0, &lor(), None, &eo()).is_err());
    }

    #[test]
    fn classification_of_the_small_width_pair() {
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let at = newton(&p, &lor(), c(1.28, 0.0), &NewtonOptions::default(), &eo()).unwrap();
        let ph = newton(&p, &lor(), c(0.97, -1e-3), &NewtonOptions::default(), &eo()).unwrap();
        let ca = classify(&p, &lor(), &at, 2, &eo()).unwrap();
        assert_eq!(ca.label, Label::Standard);
        let cp = classify(&p, &lor(), &ph, 2, &eo()).unwrap();
        assert_eq!(cp.label, Label::Nonstandard);
        assert!((cp.limit - c(1.0, -0.01)).norm() < 1e-3, "{}", cp.limit);
    }

    #[test]
    fn regimes_either_side_of_the_critical_coupling() {
        for (kappa, expected) in [
            (0.0029, Regime::WeakCoupling),
            (0.0031, Regime::StrongCoupling),
        ] {
            let p = make_params(kappa, 0.01, 0.0).unwrap();
            let r = regime_diagnose(&p, &lor(), (-0.02, 0.02), 81, &eo()).unwrap();
            assert_eq!(r.regime, expected, "κ = {kappa}");
        }
    }
}
