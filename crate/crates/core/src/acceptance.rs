//! Regression suite over the reference values and the numerical oracles.
//! Shared by the `acceptance` test target and the command-line self-test.

use num_complex::Complex64;
use serde::Serialize;

use crate::continuation::{
    classify, critical_coupling, linear_grid, regime_diagnose, track, track_grid, Regime,
    TrackOptions, Vary,
};
use crate::discrete::{discretized_matrix, dressed_eigenvalues, matrix_eigenvalues, min_gap};
use crate::error::Result;
use crate::family::CouplingFamily;
use crate::hydrogen::{hydrogen_resonances, lifetime_seconds, transition};
use crate::params::{make_params, ModelParams};
use crate::resolvent::{
    deriv_zeta, eval_f, eval_f_plus, eval_f_plus_contour, residue_closed_form, EvalOptions, FnKind,
};
use crate::rootfind::{
    find_all, negative_real_eigenvalue, newton, Label, NewtonOptions, RootResult, SeedStrategy,
};

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// `name = value` for every measured quantity.
    pub measured: Vec<String>,
    /// One line per failed check, with the difference from the target.
    pub failures: Vec<String>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "[{status}] criterion {}: {} | {}",
            self.id,
            self.title,
            self.measured.join("; ")
        )
    }
}

/// False for NaN, so a non-finite difference always fails.
fn within(x: f64, bound: f64) -> bool {
    x <= bound
}

struct Checker {
    scale: f64,
    measured: Vec<String>,
    failures: Vec<String>,
}

impl Checker {
    fn new(scale: f64) -> Self {
        Self {
            scale,
            measured: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.measured.push(s.into());
    }

    fn fail(&mut self, s: impl Into<String>) {
        self.failures.push(s.into());
    }

    /// `|got − want| ≤ tol`.
    fn abs(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.note(format!("{name} = {got:.10e}"));
        let diff = (got - want).abs();
        if !within(diff, tol * self.scale) {
            self.fail(format!(
                "{name}: {got:e} vs {want:e}, |diff| = {diff:e} > {:e}",
                tol * self.scale
            ));
        }
    }

    /// `|got − want| ≤ rel·|want|`.
    fn rel(&mut self, name: &str, got: f64, want: f64, rel: f64) {
        self.note(format!("{name} = {got:.10e}"));
        let diff = (got - want).abs();
        if !within(diff, rel * self.scale * want.abs()) {
            self.fail(format!(
                "{name}: {got:e} vs {want:e}, relative diff {:e} > {:e}",
                diff / want.abs(),
                rel * self.scale
            ));
        }
    }

    /// A bound on a worst-case error.
    fn bound(&mut self, name: &str, worst: f64, tol: f64) {
        self.note(format!("{name} = {worst:.3e}"));
        if !within(worst, tol * self.scale) {
            self.fail(format!("{name}: {worst:e} > {:e}", tol * self.scale));
        }
    }

    fn truth(&mut self, name: &str, ok: bool, detail: String) {
        self.note(format!("{name}: {detail}"));
        if !ok {
            self.fail(format!("{name} failed: {detail}"));
        }
    }

    fn error(&mut self, name: &str, e: impl std::fmt::Display) {
        self.fail(format!("{name}: {e}"));
    }

    fn finish(self, id: u32, title: &'static str) -> CriterionReport {
        CriterionReport {
            id,
            title,
            passed: self.failures.is_empty(),
            measured: self.measured,
            failures: self.failures,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn nearest(zeros: &[RootResult], to: Complex64) -> Option<&RootResult> {
    zeros
        .iter()
        .min_by(|a, b| (a.zeta - to).norm().total_cmp(&(b.zeta - to).norm()))
}

fn lor() -> CouplingFamily {
    CouplingFamily::lorentzian_squared()
}

fn fig1_params() -> ModelParams {
    make_params(0.1, 0.01, 0.25).expect("valid parameters")
}

fn fig1_pair(opts: &EvalOptions) -> Result<(RootResult, RootResult)> {
    let p = fig1_params();
    let nopts = NewtonOptions::default();
    let at = newton(&p, &lor(), c(1.28, 0.0), &nopts, opts)?;
    let ph = newton(&p, &lor(), c(0.97, -1e-3), &nopts, opts)?;
    Ok((at, ph))
}

pub const TITLES: [&str; 9] = [
    "resonance pair at (κ, μ, δ) = (0.1, 0.01, 0.25)",
    "zero-width limits at μ = 1e-4",
    "critical coupling at μ = 0.01",
    "third zero at μ = 2",
    "strong-coupling trajectory and negative eigenvalue",
    "hydrogen constants and resonances",
    "resolvent oracles",
    "discrete sector",
    "standard/nonstandard classification",
];

/// Runs criterion `id` (1–9). Every tolerance is multiplied by `scale`, so
/// `scale < 1` tightens the suite.
pub fn run_criterion(id: u32, scale: f64) -> CriterionReport {
    let opts = EvalOptions::default();
    let mut ck = Checker::new(scale);
    match id {
        1 => criterion_1(&mut ck, &opts),
        2 => criterion_2(&mut ck, &opts),
        3 => criterion_3(&mut ck, &opts),
        4 => criterion_4(&mut ck, &opts),
        5 => criterion_5(&mut ck, &opts),
        6 => criterion_6(&mut ck, &opts),
        7 => criterion_7(&mut ck, &opts),
        8 => criterion_8(&mut ck),
        9 => criterion_9(&mut ck, &opts),
        _ => ck.fail(format!("no criterion {id}")),
    }
    let title = TITLES
        .get(id.wrapping_sub(1) as usize)
        .copied()
        .unwrap_or("unknown");
    ck.finish(id, title)
}

/// Runs every criterion in order.
pub fn run_all(scale: f64) -> Vec<CriterionReport> {
    (1..=9).map(|id| run_criterion(id, scale)).collect()
}

fn criterion_1(ck: &mut Checker, opts: &EvalOptions) {
    let zeros = match find_all(&fig1_params(), &lor(), &SeedStrategy::default(), opts) {
        Ok(z) => z,
        Err(e) => return ck.error("find_all", e),
    };
    let at = nearest(&zeros, c(1.285, -2.7e-6)).map(|r| r.zeta);
    let ph = nearest(&zeros, c(0.963, -9.8e-4)).map(|r| r.zeta);
    let (Some(at), Some(ph)) = (at, ph) else {
        return ck.fail("find_all returned no zeros");
    };
    ck.abs("Re ζ_at", at.re, 1.285, 5e-4);
    ck.rel("Im ζ_at", at.im, -2.7e-6, 0.15);
    ck.abs("Re ζ_ph", ph.re, 0.963, 5e-4);
    ck.rel("Im ζ_ph", ph.im, -9.8e-4, 0.10);
}

fn criterion_2(ck: &mut Checker, opts: &EvalOptions) {
    let (at, ph) = match fig1_pair(opts) {
        Ok(v) => v,
        Err(e) => return ck.error("newton", e),
    };
    let pair = dressed_eigenvalues(1, 0.1, 0.25).expect("n = 1 is valid");
    for (name, zero, limit) in [
        ("ζ_at(1e-4)", at, pair.zeta_plus),
        ("ζ_ph(1e-4)", ph, pair.zeta_minus),
    ] {
        match track(&fig1_params(), &lor(), Vary::Mu, 1e-4, 100, zero.zeta, opts) {
            Ok(t) => ck.bound(
                &format!("|{name} − {limit:.5}|"),
                (t.last().zeta - limit).norm(),
                1e-3,
            ),
            Err(e) => ck.error(name, e),
        }
    }
}

fn criterion_3(ck: &mut Checker, opts: &EvalOptions) {
    let ep = match critical_coupling(0.01, &lor(), None, opts) {
        Ok(ep) => ep,
        Err(e) => return ck.error("critical_coupling", e),
    };
    ck.abs("κ_c", ep.kappa_c, 3e-3, 1e-3);
    ck.abs("δ_c", ep.delta_c, 0.0, 1e-3);
    ck.note(format!("ζ_c = {:.10}", ep.zeta_c));
    ck.bound(
        "max EP residual",
        ep.condition_residuals.0.max(ep.condition_residuals.1),
        1e-10,
    );
    let range = (ep.delta_c - 0.02, ep.delta_c + 0.02);
    let probes = [
        (
            "κ_c(1−1e-3)",
            ep.kappa_c * (1.0 - 1e-3),
            Regime::WeakCoupling,
        ),
        (
            "κ_c(1+1e-3)",
            ep.kappa_c * (1.0 + 1e-3),
            Regime::StrongCoupling,
        ),
        ("κ = 0.0029", 0.0029, Regime::WeakCoupling),
        ("κ = 0.0031", 0.0031, Regime::StrongCoupling),
    ];
    for (name, kappa, want) in probes {
        let delta = if name.starts_with("κ_c") {
            ep.delta_c
        } else {
            0.0
        };
        let got = make_params(kappa, 0.01, delta)
            .and_then(|p| regime_diagnose(&p, &lor(), range, 81, opts));
        match got {
            Ok(r) => ck.truth(name, r.regime == want, format!("{:?}", r.regime)),
            Err(e) => ck.error(name, e),
        }
    }
}

fn criterion_4(ck: &mut Checker, opts: &EvalOptions) {
    let p = make_params(0.1, 2.0, 0.25).expect("valid parameters");
    let zeros = match find_all(&p, &lor(), &SeedStrategy::default(), opts) {
        Ok(z) => z,
        Err(e) => return ck.error("find_all", e),
    };
    let u = nearest(&zeros, c(1.005, -2.095)).map(|r| r.zeta);
    let ph = nearest(&zeros, c(0.993, -1.895)).map(|r| r.zeta);
    let (Some(u), Some(ph)) = (u, ph) else {
        return ck.fail("find_all returned no zeros");
    };
    ck.abs("Re ζ_u", u.re, 1.005, 5e-3);
    ck.abs("Im ζ_u", u.im, -2.095, 5e-3);
    ck.abs("Re ζ_ph(2)", ph.re, 0.993, 5e-3);
    ck.abs("Im ζ_ph(2)", ph.im, -1.895, 5e-3);
    let gap = (u - ph).norm();
    ck.truth(
        "distinct",
        gap > crate::rootfind::DEDUP_RADIUS,
        format!("|ζ_u − ζ_ph| = {gap:.4}"),
    );
}

fn criterion_5(ck: &mut Checker, opts: &EvalOptions) {
    let (_, ph) = match fig1_pair(opts) {
        Ok(v) => v,
        Err(e) => return ck.error("newton", e),
    };
    match track(
        &fig1_params(),
        &lor(),
        Vary::Kappa,
        1.0062,
        200,
        ph.zeta,
        opts,
    ) {
        Ok(t) => {
            let end = t.last().zeta;
            ck.note(format!("ζ(κ = 1.0062) = {end:.8}"));
            ck.abs("Re ζ(1.0062)", end.re, 0.11, 0.01);
        }
        Err(e) => ck.error("track κ", e),
    }
    let ladder = [1.2, 1.16, 1.14, 1.13, 1.125, 1.12, 1.119, 1.1185, 1.118];
    let mut values = Vec::new();
    for k in ladder {
        let p = fig1_params().with_kappa(k).expect("valid coupling");
        match negative_real_eigenvalue(&p, &lor(), opts) {
            Ok(v) => values.push(v),
            Err(e) => return ck.error("negative eigenvalue", e),
        }
    }
    let at_12 = values[0];
    ck.truth(
        "negative eigenvalue at κ = 1.2",
        matches!(at_12, Some(x) if x < 0.0),
        format!("{at_12:?}"),
    );
    let found: Vec<f64> = values.iter().flatten().copied().collect();
    let monotone =
        found.len() == ladder.len() && found.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0);
    ck.truth(
        "ζ* → 0⁻ monotonically as κ ↓ 1.118",
        monotone,
        format!(
            "ζ*(1.118) = {:.3e}",
            found.last().copied().unwrap_or(f64::NAN)
        ),
    );
    ck.bound(
        "|ζ*(1.118)|",
        found.last().map_or(f64::INFINITY, |x| x.abs()),
        1e-3,
    );
}

fn criterion_6(ck: &mut Checker, opts: &EvalOptions) {
    for (n, want) in [(2, 0.018), (10, 0.022), (50, 0.028)] {
        match transition(n) {
            Ok(t) => ck.abs(&format!("κ_{n}"), t.kappa_n, want, 1e-3),
            Err(e) => ck.error(&format!("transition({n})"), e),
        }
    }
    let res = match hydrogen_resonances(2, opts) {
        Ok(r) => r,
        Err(e) => return ck.error("hydrogen_resonances(2)", e),
    };
    ck.abs("μ_2", res.transition.mu_n, 548.0, 2.0);
    match &res.nonstandard {
        Some(ns) => {
            ck.rel("Re ζ_2,ns", ns.zeta.re, 1.493, 0.01);
            ck.rel("Im ζ_2,ns", ns.zeta.im, -544.0, 0.01);
        }
        None => ck.fail("no nonstandard zero"),
    }
    let s = res.standard.zeta;
    ck.note(format!("ζ_2,s = {s:.12e}"));
    ck.rel("Im ζ_2,s", s.im, -2e-8, 0.5);
    match lifetime_seconds(s, &res.transition, 2) {
        Ok(tau) => ck.rel("τ_2 (2 channels) [s]", tau, 1.6e-9, 0.10),
        Err(e) => ck.error("lifetime", e),
    }
}

fn criterion_7(ck: &mut Checker, opts: &EvalOptions) {
    let family = lor();
    let sets = [
        make_params(0.1, 0.01, 0.25).expect("valid"),
        make_params(1.0, 0.5, 0.0).expect("valid"),
    ];
    let res: [f64; 5] = [-0.5, 0.5, 0.99, 1.3, 3.0];
    let ims: [f64; 5] = [1e-3, 1e-2, 0.1, 0.5, 2.0];

    let mut worst = 0.0f64;
    let mut schwarz = 0.0f64;
    for p in &sets {
        for &x in &res {
            for &y in &ims {
                let z = c(x, y);
                let quad = eval_f(p, &family, z, opts);
                let exact = residue_closed_form(p, &family, z);
                let mirror = eval_f(p, &family, z.conj(), opts);
                match (quad, exact, mirror) {
                    (Ok(q), Ok(e), Ok(m)) => {
                        worst = worst.max((q - e).norm() / e.norm());
                        schwarz = schwarz.max((m - q.conj()).norm() / q.norm());
                    }
                    (a, b, m) => {
                        return ck
                            .error(&format!("oracle grid at {z}"), format!("{a:?} {b:?} {m:?}"));
                    }
                }
            }
        }
    }
    ck.bound("quadrature vs residues (rel)", worst, 1e-10);
    ck.bound("Schwarz symmetry (rel)", schwarz, 1e-12);

    let mut strip = 0.0f64;
    for p in &sets {
        for frac in [0.45, 0.3, 0.15] {
            for x in [0.5, 0.9, 1.0, 1.1, 1.5] {
                let z = c(x, -frac * p.mu);
                match (
                    eval_f_plus(p, &family, z, opts),
                    eval_f_plus_contour(p, &family, z, opts),
                ) {
                    (Ok(a), Ok(b)) => strip = strip.max((a - b).norm() / a.norm().max(1.0)),
                    (a, b) => return ck.error(&format!("strip at {z}"), format!("{a:?} {b:?}")),
                }
            }
        }
    }
    ck.bound("jump vs deformed contour", strip, 1e-8);

    // Each one-sided value differs from its limit by ±iε f'(E) + O(ε²), so
    // the limits are estimated by a first-order step back to the axis.
    let mut cut = 0.0f64;
    let mut raw = 0.0f64;
    let eps = 1e-7;
    for p in &sets {
        for j in 0..10 {
            let e = 0.55 + 0.1 * j as f64;
            let (above, below) = (c(e, eps), c(e, -eps));
            let vals = (
                eval_f(p, &family, above, opts),
                deriv_zeta(FnKind::F, p, &family, above, opts),
                eval_f_plus(p, &family, below, opts),
                deriv_zeta(FnKind::FPlus, p, &family, below, opts),
            );
            match vals {
                (Ok(a), Ok(da), Ok(b), Ok(db)) => {
                    let from_above = a - c(0.0, eps) * da;
                    let from_below = b + c(0.0, eps) * db;
                    cut = cut.max((from_above - from_below).norm());
                    raw = raw.max((a - b).norm());
                }
                v => return ck.error(&format!("cut at {e}"), format!("{v:?}")),
            }
        }
    }
    ck.note(format!("max |f(E+iε) − f₊(E−iε)| = {raw:.3e}"));
    ck.bound("cut continuity", cut, 1e-6);

    let mut deriv = 0.0f64;
    let h = 1e-6;
    let points = [
        (FnKind::F, c(1.5, 0.5)),
        (FnKind::F, c(0.8, 0.05)),
        (FnKind::F, c(-0.3, -0.2)),
        (FnKind::FPlus, c(1.285, -0.003)),
        (FnKind::FPlus, c(0.9, -0.2)),
    ];
    for p in &sets {
        for (kind, z) in points {
            let f = |w: Complex64| match kind {
                FnKind::F => eval_f(p, &family, w, opts),
                FnKind::FPlus => eval_f_plus(p, &family, w, opts),
            };
            let d = deriv_zeta(kind, p, &family, z, opts);
            match (d, f(z + h), f(z - h)) {
                (Ok(d), Ok(a), Ok(b)) => {
                    let fd = (a - b) / (2.0 * h);
                    deriv = deriv.max((d - fd).norm() / d.norm().max(1.0));
                }
                (d, a, b) => {
                    return ck.error(&format!("derivative at {z}"), format!("{d:?} {a:?} {b:?}"))
                }
            }
        }
    }
    ck.bound("∂ζ f vs central difference (rel)", deriv, 1e-6);
}

fn criterion_8(ck: &mut Checker) {
    let mut split = 0.0f64;
    let mut spread = 0.0f64;
    for n in 1..=3u32 {
        for kappa in [0.1, 0.002, 0.7] {
            let pair = dressed_eigenvalues(n, kappa, 0.0).expect("valid n");
            let want = 2.0 * kappa * (n as f64).sqrt();
            split = split.max((pair.splitting - want).abs() / want);
            // The difference of the two eigenvalues is exact up to their rounding.
            let ulps =
                (pair.zeta_plus - pair.zeta_minus - want).abs() / (f64::EPSILON * pair.zeta_plus);
            spread = spread.max(ulps);
        }
    }
    ck.bound("VRS splitting vs 2κ√n (rel)", split, 4.0 * f64::EPSILON);
    ck.bound("ζ₊ − ζ₋ vs 2κ√n (ulps of ζ₊)", spread, 4.0);
    let mut trace = 0.0f64;
    for kappa in [0.1, 0.002] {
        for j in 0..=40 {
            let d = -0.5 + 0.025 * j as f64;
            let e = matrix_eigenvalues(&discretized_matrix(kappa, 0.01, d));
            trace = trace.max((e.iter().sum::<f64>() - (4.0 + d)).abs());
        }
    }
    ck.bound("trace identity", trace, 1e-12);
    for kappa in [0.1, 0.002] {
        match min_gap(kappa, 0.01, (-0.5, 0.5), 201) {
            Ok(g) => ck.truth(&format!("min gap κ = {kappa}"), g > 0.0, format!("{g:.3e}")),
            Err(e) => ck.error("min_gap", e),
        }
    }
}

fn criterion_9(ck: &mut Checker, opts: &EvalOptions) {
    let (at, ph) = match fig1_pair(opts) {
        Ok(v) => v,
        Err(e) => return ck.error("newton", e),
    };
    let p = fig1_params();
    let family = lor();
    let checkpoints = [0.01, 0.5, 1.0, 2.0, 5.0];
    let mut grid = vec![0.01];
    for (w, steps) in checkpoints.windows(2).zip([49, 5, 10, 30]) {
        grid.extend(linear_grid(w[0], w[1], steps).into_iter().skip(1));
    }
    for (name, zero, want) in [
        ("ζ_at", &at, Label::Standard),
        ("ζ_ph", &ph, Label::Nonstandard),
    ] {
        let traj = match track_grid(
            &p,
            &family,
            Vary::Mu,
            &grid,
            zero.zeta,
            &TrackOptions::default(),
            opts,
        )
        .into_result()
        {
            Ok(t) => t,
            Err(e) => return ck.error(&format!("track {name} in μ"), e),
        };
        for mu in checkpoints {
            let Some((_, r)) = traj.samples.iter().find(|(m, _)| (m - mu).abs() < 1e-12) else {
                return ck.fail(format!("μ = {mu} missing from the {name} track"));
            };
            let pm = p.with_mu(mu).expect("valid width");
            match classify(&pm, &family, r, 2, opts) {
                Ok(cl) => ck.truth(
                    &format!("{name}(μ = {mu})"),
                    cl.label == want,
                    format!("{:.6} → {:?}", r.zeta, cl.label),
                ),
                Err(e) => ck.error(&format!("classify {name}(μ = {mu})"), e),
            }
        }
    }
}
