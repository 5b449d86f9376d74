//! The subcommands. Each returns an [`Outcome`]; files are written only
//! after the computation is complete.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use resonance_atlas::acceptance::{run_criterion, CriterionReport};
use resonance_atlas::continuation::{
    geometric_grid, label_of, linear_grid, resonance_pair, track_many, EpGuess, TrackOptions,
};
use resonance_atlas::discrete::eigenvalue_curves;
use resonance_atlas::hydrogen::{lifetime_seconds, resonances_for, transition, HydrogenTransition};
use resonance_atlas::rootfind::NewtonOptions;
use resonance_atlas::{
    critical_coupling, dressed_eigenvalues, find_all, make_params, newton, regime_diagnose,
    ContinuationMethod, CouplingFamily, EvalOptions, Label, ModelParams, RootResult, SeedStrategy,
    Trajectory, Vary,
};
use serde_json::{json, Value};

use crate::args::{
    CriticalParams, DiscreteMode, DiscreteParams, DiscretePreset, FamilyChoice, FindParams,
    HydrogenParams, MethodChoice, Model, Point, SelftestParams, Spacing, SweepParams, SweepPreset,
    VaryChoice,
};
use crate::config::Layered;
use crate::output::{csv_bytes, ensure_dir, svg_plot, usage, write_all, Failure, Outcome, Report};

/// The width at which the critical coupling has a regression value.
const REFERENCE_CRITICAL_MU: f64 = 0.01;

struct Resolved {
    params: ModelParams,
    family: CouplingFamily,
    opts: EvalOptions,
    hydrogen: Option<HydrogenTransition>,
}

fn eval_options(method: Option<MethodChoice>) -> EvalOptions {
    EvalOptions {
        continuation_method: match method.unwrap_or(MethodChoice::Jump) {
            MethodChoice::Jump => ContinuationMethod::ClosedFormJump,
            MethodChoice::Contour => ContinuationMethod::DeformedContour,
            MethodChoice::CrossChecked => ContinuationMethod::CrossChecked,
        },
        ..EvalOptions::default()
    }
}

fn family_of(
    choice: FamilyChoice,
    numerator: &Option<Vec<f64>>,
    denominator: &Option<Vec<f64>>,
) -> Result<CouplingFamily, Failure> {
    Ok(match choice {
        FamilyChoice::Lorentzian => CouplingFamily::lorentzian_squared(),
        FamilyChoice::SimplePole => CouplingFamily::simple_pole(),
        FamilyChoice::Rational => match (numerator, denominator) {
            (Some(n), Some(d)) => CouplingFamily::user_rational(n.clone(), d.clone())?,
            _ => return usage("the rational family needs --numerator and --denominator"),
        },
        FamilyChoice::Hydrogen => {
            return usage("this subcommand does not take the hydrogen family")
        }
    })
}

fn resolve(m: &Model) -> Result<Resolved, Failure> {
    let opts = eval_options(m.method);
    let choice = m.family.unwrap_or(FamilyChoice::Lorentzian);
    if choice == FamilyChoice::Hydrogen {
        let Some(n) = m.n else {
            return usage("the hydrogen family needs --n");
        };
        if m.mu.is_some() || m.delta.is_some() {
            return usage("μ and δ are fixed by the hydrogen transition");
        }
        let t = transition(n)?;
        let params = t.params()?.with_kappa(m.kappa.unwrap_or(t.kappa_n))?;
        return Ok(Resolved {
            params,
            family: t.family()?,
            opts,
            hydrogen: Some(t),
        });
    }
    let (Some(kappa), Some(mu)) = (m.kappa, m.mu) else {
        return usage("--kappa and --mu are required");
    };
    Ok(Resolved {
        params: make_params(kappa, mu, m.delta.unwrap_or(0.0))?,
        family: family_of(choice, &m.numerator, &m.denominator)?,
        opts,
        hydrogen: None,
    })
}

fn model_json(r: &Resolved) -> Value {
    json!({
        "family": r.family.name(),
        "kappa": r.params.kappa,
        "mu": r.params.mu,
        "delta": r.params.delta,
        "hydrogen_n": r.hydrogen.as_ref().map(|t| t.n),
        "continuation_method": r.opts.continuation_method,
    })
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn fmt_c(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.10} {sign} {:.6e}i", z.re, z.im.abs())
}

fn label_name(l: Option<Label>) -> &'static str {
    match l {
        Some(Label::Standard) => "standard",
        Some(Label::Nonstandard) => "nonstandard",
        Some(Label::Unclassified) | None => "unclassified",
    }
}

fn zero_json(r: &RootResult) -> Value {
    json!({
        "zeta": complex_json(r.zeta),
        "sheet": r.sheet,
        "label": label_name(r.label),
        "residual": r.residual,
        "iterations": r.iterations,
    })
}

fn labelled(r: &RootResult, label: Label) -> RootResult {
    RootResult {
        label: Some(label),
        ..r.clone()
    }
}

fn zero_line(r: &RootResult) -> String {
    format!(
        "ζ = {}  sheet {:?}  {}  |f| = {:.2e}",
        fmt_c(r.zeta),
        r.sheet,
        label_name(r.label),
        r.residual
    )
}

pub fn find(p: FindParams) -> Result<Outcome, Failure> {
    let r = resolve(&p.model)?;
    let zeros: Vec<RootResult> = if let Some(t) = &r.hydrogen {
        let found = resonances_for(t.clone(), r.params.kappa, &r.opts)?;
        let mut out = vec![labelled(&found.standard, Label::Standard)];
        out.extend(found.nonstandard.map(|z| labelled(&z, Label::Nonstandard)));
        out
    } else {
        let strategy = SeedStrategy {
            extra: p
                .seed
                .unwrap_or_default()
                .into_iter()
                .map(|s| s.0)
                .collect(),
            ..SeedStrategy::default()
        };
        let steps = p.classify_steps.unwrap_or(10);
        let found = find_all(&r.params, &r.family, &strategy, &r.opts)?;
        found
            .into_par_iter()
            .map(|z| {
                let label = z
                    .label
                    .unwrap_or_else(|| label_of(&r.params, &r.family, &z, steps, &r.opts));
                RootResult {
                    label: Some(label),
                    ..z
                }
            })
            .collect()
    };
    let worst = zeros.iter().map(|z| z.residual).fold(0.0, f64::max);
    let mut lines = vec![format!("{} zero(s)", zeros.len())];
    lines.extend(zeros.iter().map(zero_line));
    Ok(Outcome {
        report: Report::new(
            model_json(&r),
            json!({ "zeros": zeros.iter().map(zero_json).collect::<Vec<_>>() }),
            json!({ "max_abs_f": worst }),
        ),
        lines,
        failure: None,
    })
}

fn sweep_preset(p: SweepPreset) -> SweepParams {
    let base = |kappa: f64, mu: f64, delta: f64| Model {
        kappa: Some(kappa),
        mu: Some(mu),
        delta: Some(delta),
        family: Some(FamilyChoice::Lorentzian),
        ..Model::default()
    };
    let stem = |s: &str| Some(s.to_string());
    match p {
        SweepPreset::Fig1 => SweepParams {
            model: base(0.1, 0.01, 0.25),
            vary: Some(VaryChoice::Mu),
            to: Some(1.0),
            steps: Some(400),
            stem: stem("fig1"),
            ..SweepParams::default()
        },
        SweepPreset::Fig4 | SweepPreset::Fig5 => SweepParams {
            model: base(0.1, 0.01, -0.9),
            vary: Some(VaryChoice::Delta),
            to: Some(3.0),
            steps: Some(780),
            stem: stem(if p == SweepPreset::Fig4 {
                "fig4"
            } else {
                "fig5"
            }),
            ..SweepParams::default()
        },
        SweepPreset::Fig8Strong | SweepPreset::Fig8Weak => {
            let strong = p == SweepPreset::Fig8Strong;
            SweepParams {
                model: base(if strong { 0.0031 } else { 0.0029 }, 0.01, -0.02),
                vary: Some(VaryChoice::Delta),
                to: Some(0.02),
                steps: Some(400),
                stem: stem(if strong { "fig8-strong" } else { "fig8-weak" }),
                ..SweepParams::default()
            }
        }
        SweepPreset::Fig10 => SweepParams {
            model: base(0.1, 2.0, 0.25),
            vary: Some(VaryChoice::Mu),
            to: Some(0.01),
            steps: Some(400),
            spacing: Some(Spacing::Geometric),
            seed: Some(vec![Point(Complex64::new(1.005, -2.095))]),
            stem: stem("fig10"),
            ..SweepParams::default()
        },
    }
}

fn vary_of(v: VaryChoice) -> Vary {
    match v {
        VaryChoice::Kappa => Vary::Kappa,
        VaryChoice::Mu => Vary::Mu,
        VaryChoice::Delta => Vary::Delta,
    }
}

fn branch_csv(k: usize, t: &Trajectory) -> Vec<u8> {
    csv_bytes(
        &["param", "re", "im", "branch", "residual"],
        t.samples.iter().map(|(p, r)| {
            vec![
                p.to_string(),
                r.zeta.re.to_string(),
                r.zeta.im.to_string(),
                k.to_string(),
                format!("{:e}", r.residual),
            ]
        }),
    )
}

pub fn sweep(p: SweepParams, out: &Path) -> Result<Outcome, Failure> {
    let p = match p.preset {
        Some(preset) => p.layer(sweep_preset(preset)),
        None => p,
    };
    let Some(vary) = p.vary.map(vary_of) else {
        return usage("--vary is required");
    };
    let Some(to) = p.to else {
        return usage("--to is required");
    };
    let steps = p.steps.unwrap_or(200);
    if steps == 0 {
        return usage("--steps must be positive");
    }
    let r = resolve(&p.model)?;
    let from = p.from.unwrap_or(vary.get(&r.params));
    let start = vary.set(&r.params, from)?;
    vary.set(&r.params, to)?;
    let defaults = TrackOptions::default();
    let topts = TrackOptions {
        continuity_cap: p.continuity_cap.unwrap_or(defaults.continuity_cap),
        min_step_ratio: p.min_step_ratio.unwrap_or(defaults.min_step_ratio),
        ..defaults
    };
    if !(topts.continuity_cap > 0.0 && topts.min_step_ratio > 0.0 && topts.min_step_ratio < 1.0) {
        return usage("need --continuity-cap > 0 and 0 < --min-step-ratio < 1");
    }
    let grid = match p.spacing.unwrap_or(Spacing::Linear) {
        Spacing::Linear => linear_grid(from, to, steps),
        Spacing::Geometric => {
            if (from * to).is_nan() || from * to <= 0.0 {
                return usage("geometric spacing needs endpoints of one sign");
            }
            geometric_grid(from, to, steps)
        }
    };
    let nopts = NewtonOptions::default();
    let zeros: Vec<Complex64> = match &p.seed {
        Some(seeds) if !seeds.is_empty() => seeds
            .iter()
            .map(|s| newton(&start, &r.family, s.0, &nopts, &r.opts).map(|z| z.zeta))
            .collect::<Result<_, _>>()?,
        _ => resonance_pair(&start, &r.family, &r.opts)?.to_vec(),
    };
    let tracked = track_many(&start, &r.family, vary, &grid, &zeros, &topts, &r.opts);
    if tracked.done.is_empty() {
        return Err(tracked.lost.map_or_else(
            || Failure::Numerical("nothing was tracked".into()),
            Failure::from,
        ));
    }

    let stem = p.stem.clone().unwrap_or_else(|| "sweep".into());
    let mut files: Vec<_> = tracked
        .done
        .iter()
        .enumerate()
        .map(|(k, t)| (out.join(format!("{stem}.branch{k}.csv")), branch_csv(k, t)))
        .collect();
    if !p.no_svg.unwrap_or(false) {
        let against_param = p.preset == Some(SweepPreset::Fig5);
        let series: Vec<Vec<(f64, f64)>> = tracked
            .done
            .iter()
            .map(|t| {
                t.samples
                    .iter()
                    .map(|(x, r)| {
                        if against_param {
                            (*x, r.zeta.re)
                        } else {
                            (r.zeta.re, r.zeta.im)
                        }
                    })
                    .collect()
            })
            .collect();
        let (xl, yl) = if against_param {
            (vary.name(), "Re ζ")
        } else {
            ("Re ζ", "Im ζ")
        };
        files.push((
            out.join(format!("{stem}.svg")),
            svg_plot(&series, xl, yl).into_bytes(),
        ));
    }
    ensure_dir(out)?;
    let written = write_all(&files)?;

    let branches: Vec<Value> = tracked
        .done
        .iter()
        .map(|t| {
            json!({
                "samples": t.samples.len(),
                "start": complex_json(t.samples[0].1.zeta),
                "end": complex_json(t.last().zeta),
                "end_param": t.end_param(),
            })
        })
        .collect();
    let worst = tracked
        .done
        .iter()
        .flat_map(|t| t.samples.iter().map(|(_, r)| r.residual))
        .fold(0.0, f64::max);
    let lost_at = match &tracked.lost {
        Some(resonance_atlas::AtlasError::TrackingLost { param }) => Some(*param),
        _ => None,
    };
    let mut lines: Vec<String> = tracked
        .done
        .iter()
        .enumerate()
        .map(|(k, t)| {
            format!(
                "branch {k}: {} → {} ({} samples, {vary} {} → {})",
                fmt_c(t.samples[0].1.zeta),
                fmt_c(t.last().zeta),
                t.samples.len(),
                t.samples[0].0,
                t.end_param()
            )
        })
        .collect();
    lines.extend(written.iter().map(|w| format!("wrote {}", w.display())));
    let failure = tracked.lost.as_ref().map(|e| {
        lines.push(format!("tracking stopped: {e}"));
        Failure::from(e.clone())
    });
    Ok(Outcome {
        report: Report::new(
            json!({
                "model": model_json(&r),
                "vary": vary.name(),
                "from": from,
                "to": to,
                "steps": steps,
                "spacing": format!("{:?}", p.spacing.unwrap_or(Spacing::Linear)).to_lowercase(),
                "seeds": zeros.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            }),
            json!({
                "branches": branches,
                "files": written.iter().map(|w| w.display().to_string()).collect::<Vec<_>>(),
                "complete": tracked.lost.is_none(),
                "lost_at": lost_at,
                "error": tracked.lost.as_ref().map(|e| e.to_string()),
            }),
            json!({ "max_abs_f": worst }),
        ),
        lines,
        failure,
    })
}

pub fn critical(p: CriticalParams) -> Result<Outcome, Failure> {
    let Some(mu) = p.mu else {
        return usage("--mu is required");
    };
    if !(mu > 0.0 && mu.is_finite()) {
        return usage(format!("--mu must be positive, got {mu}"));
    }
    let choice = p.family.unwrap_or(FamilyChoice::Lorentzian);
    let family = family_of(choice, &p.numerator, &p.denominator)?;
    let opts = EvalOptions::default();
    let d = EpGuess::default_for(mu);
    let guess = EpGuess {
        kappa: p.kappa_guess.unwrap_or(d.kappa),
        delta: p.delta_guess.unwrap_or(d.delta),
        zeta: p.zeta_guess.map_or(d.zeta, |z| z.0),
    };
    let ep = critical_coupling(mu, &family, Some(guess), &opts)?;

    let probes: Vec<Value> = if p.no_probe.unwrap_or(false) {
        Vec::new()
    } else {
        [1.0 - 1e-3, 1.0 + 1e-3]
            .par_iter()
            .map(|f| {
                let kappa = ep.kappa_c * f;
                let regime = make_params(kappa, mu, ep.delta_c)
                    .and_then(|q| {
                        regime_diagnose(
                            &q,
                            &family,
                            (ep.delta_c - 2.0 * mu, ep.delta_c + 2.0 * mu),
                            81,
                            &opts,
                        )
                    })
                    .map(|rep| format!("{:?}", rep.regime));
                json!({
                    "kappa": kappa,
                    "regime": regime.as_ref().ok(),
                    "error": regime.as_ref().err().map(|e| e.to_string()),
                })
            })
            .collect()
    };
    let consistent = probes.len() == 2
        && probes[0]["regime"] == "WeakCoupling"
        && probes[1]["regime"] == "StrongCoupling";
    let status = if choice == FamilyChoice::Lorentzian && mu == REFERENCE_CRITICAL_MU {
        "regression"
    } else {
        "unverified"
    };
    let mut lines = vec![
        format!("κ_c = {:.12}  (κ_c/μ = {:.9})", ep.kappa_c, ep.kappa_c / mu),
        format!("δ_c = {:.3e}", ep.delta_c),
        format!("ζ_c = {}", fmt_c(ep.zeta_c)),
        format!(
            "|f₊| = {:.2e}, |∂ζ f₊| = {:.2e}, {} iterations",
            ep.condition_residuals.0, ep.condition_residuals.1, ep.iterations
        ),
    ];
    for pr in &probes {
        lines.push(format!(
            "probe κ = {:.9}: {}",
            pr["kappa"].as_f64().unwrap_or(f64::NAN),
            pr["regime"]
                .as_str()
                .or(pr["error"].as_str())
                .unwrap_or("?")
        ));
    }
    lines.push(format!("reference: {status}"));
    Ok(Outcome {
        report: Report::new(
            json!({ "mu": mu, "family": family.name(), "guess": guess }),
            json!({
                "kappa_c": ep.kappa_c,
                "delta_c": ep.delta_c,
                "zeta_c": complex_json(ep.zeta_c),
                "kappa_c_over_mu": ep.kappa_c / mu,
                "iterations": ep.iterations,
                "probes": probes,
                "probes_consistent": consistent,
                "reference": status,
            }),
            json!({ "f_plus": ep.condition_residuals.0, "df_plus": ep.condition_residuals.1 }),
        ),
        lines,
        failure: None,
    })
}

fn discrete_preset(p: DiscretePreset) -> DiscreteParams {
    let stem = |s: &str| Some(s.to_string());
    match p {
        DiscretePreset::Fig3 => DiscreteParams {
            mode: Some(DiscreteMode::Dressed),
            kappa: Some(0.1),
            n: Some(1),
            from: Some(-0.5),
            to: Some(0.5),
            steps: Some(201),
            stem: stem("fig3"),
            ..DiscreteParams::default()
        },
        DiscretePreset::Fig6 => DiscreteParams {
            mode: Some(DiscreteMode::Matrix),
            kappa: Some(0.1),
            mu: Some(0.01),
            from: Some(-0.1),
            to: Some(0.1),
            steps: Some(401),
            stem: stem("fig6"),
            ..DiscreteParams::default()
        },
        DiscretePreset::Fig9 => DiscreteParams {
            mode: Some(DiscreteMode::Matrix),
            kappa: Some(0.002),
            mu: Some(0.01),
            from: Some(-0.03),
            to: Some(0.03),
            steps: Some(601),
            stem: stem("fig9"),
            ..DiscreteParams::default()
        },
    }
}

pub fn discrete(p: DiscreteParams, out: &Path) -> Result<Outcome, Failure> {
    let p = match p.preset {
        Some(preset) => p.layer(discrete_preset(preset)),
        None => p,
    };
    let mode = p.mode.unwrap_or(DiscreteMode::Matrix);
    let Some(kappa) = p.kappa else {
        return usage("--kappa is required");
    };
    let (from, to) = (p.from.unwrap_or(-0.1), p.to.unwrap_or(0.1));
    let steps = p.steps.unwrap_or(201);
    if !(kappa.is_finite() && from.is_finite() && to.is_finite()) || steps < 2 || from >= to {
        return usage("need finite --kappa and --from < --to with at least two --steps");
    }
    let stem = p.stem.clone().unwrap_or_else(|| "discrete".into());
    let (header, rows, summary, inputs): (Vec<&str>, Vec<Vec<f64>>, Value, Value) = match mode {
        DiscreteMode::Matrix => {
            let Some(mu) = p.mu else {
                return usage("matrix mode needs --mu");
            };
            if !(mu > 0.0 && mu.is_finite()) {
                return usage(format!("--mu must be positive, got {mu}"));
            }
            let curves = eigenvalue_curves(kappa, mu, (from, to), steps)?;
            let gap = curves
                .iter()
                .flat_map(|(_, e)| e.windows(2).map(|w| w[1] - w[0]))
                .fold(f64::INFINITY, f64::min);
            (
                vec!["delta", "e1", "e2", "e3", "e4"],
                curves
                    .iter()
                    .map(|(d, e)| vec![*d, e[0], e[1], e[2], e[3]])
                    .collect(),
                json!({ "min_adjacent_gap": gap }),
                json!({ "mode": "matrix", "kappa": kappa, "mu": mu, "from": from, "to": to, "steps": steps }),
            )
        }
        DiscreteMode::Dressed => {
            let n = p.n.unwrap_or(1);
            let deltas: Vec<f64> = (0..steps)
                .map(|j| from + (to - from) * j as f64 / (steps - 1) as f64)
                .collect();
            let pairs = deltas
                .par_iter()
                .map(|d| dressed_eigenvalues(n, kappa, *d))
                .collect::<Result<Vec<_>, _>>()?;
            let min_split = pairs
                .iter()
                .map(|q| q.splitting)
                .fold(f64::INFINITY, f64::min);
            (
                vec!["delta", "zeta_minus", "zeta_plus"],
                deltas
                    .iter()
                    .zip(&pairs)
                    .map(|(d, q)| vec![*d, q.zeta_minus, q.zeta_plus])
                    .collect(),
                json!({ "min_splitting": min_split, "resonant_splitting": 2.0 * kappa * (n as f64).sqrt() }),
                json!({ "mode": "dressed", "kappa": kappa, "n": n, "from": from, "to": to, "steps": steps }),
            )
        }
    };
    let mut files = vec![(
        out.join(format!("{stem}.csv")),
        csv_bytes(
            &header,
            rows.iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect()),
        ),
    )];
    if !p.no_svg.unwrap_or(false) {
        let series: Vec<Vec<(f64, f64)>> = (1..header.len())
            .map(|c| rows.iter().map(|r| (r[0], r[c])).collect())
            .collect();
        files.push((
            out.join(format!("{stem}.svg")),
            svg_plot(&series, "δ", "energy").into_bytes(),
        ));
    }
    ensure_dir(out)?;
    let written = write_all(&files)?;
    let mut lines = vec![format!("{} detunings, {}", rows.len(), summary)];
    lines.extend(written.iter().map(|w| format!("wrote {}", w.display())));
    Ok(Outcome {
        report: Report::new(
            inputs,
            json!({
                "summary": summary,
                "files": written.iter().map(|w| w.display().to_string()).collect::<Vec<_>>(),
            }),
            json!({}),
        ),
        lines,
        failure: None,
    })
}

pub fn hydrogen(p: HydrogenParams) -> Result<Outcome, Failure> {
    let ns = p.n.unwrap_or_else(|| vec![2]);
    let channels = p.channels.unwrap_or(2);
    if ns.is_empty() {
        return usage("--n needs at least one value");
    }
    let opts = EvalOptions::default();
    let results = ns
        .par_iter()
        .map(|n| {
            let t = transition(*n)?;
            let r = resonances_for(t.clone(), t.kappa_n, &opts)?;
            let tau = lifetime_seconds(r.standard.zeta, &t, channels)?;
            Ok((r, tau))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut lines = Vec::new();
    let mut worst = 0.0f64;
    let outputs: Vec<Value> = results
        .iter()
        .map(|(r, tau)| {
            let t = &r.transition;
            lines.push(format!(
                "n = {}: μ = {:.6}, κ = {:.6}, ℰ = {:.6} eV",
                t.n, t.mu_n, t.kappa_n, t.level_spacing_ev
            ));
            lines.push(format!("  standard    {}  τ = {:.4e} s", fmt_c(r.standard.zeta), tau));
            worst = worst.max(r.standard.residual);
            match &r.nonstandard {
                Some(ns) => {
                    lines.push(format!("  nonstandard {}", fmt_c(ns.zeta)));
                    worst = worst.max(ns.residual);
                }
                None => lines.push("  nonstandard not found".into()),
            }
            json!({
                "n": t.n,
                "mu_n": t.mu_n,
                "kappa_n": t.kappa_n,
                "d_n": t.d_n,
                "log_d_n": t.log_d_n,
                "alpha_n": t.alpha_n,
                "beta_n": t.beta_n,
                "level_spacing_ev": t.level_spacing_ev,
                "standard": zero_json(&labelled(&r.standard, Label::Standard)),
                "nonstandard": r.nonstandard.as_ref().map(|z| zero_json(&labelled(z, Label::Nonstandard))),
                "lifetime_s": tau,
            })
        })
        .collect();
    Ok(Outcome {
        report: Report::new(
            json!({ "n": ns, "channels": channels }),
            json!({ "transitions": outputs }),
            json!({ "max_abs_f": worst }),
        ),
        lines,
        failure: None,
    })
}

pub fn selftest(p: SelftestParams) -> Result<Outcome, Failure> {
    let ids = p.criterion.unwrap_or_else(|| (1..=9).collect());
    let scale = p.tolerance_scale.unwrap_or(1.0);
    if !(scale > 0.0 && scale.is_finite()) {
        return usage("--tolerance-scale must be positive");
    }
    if let Some(bad) = ids.iter().find(|i| !(1..=9).contains(*i)) {
        return usage(format!("no criterion {bad}; expected 1 to 9"));
    }
    let reports: Vec<CriterionReport> = ids.iter().map(|i| run_criterion(*i, scale)).collect();
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut lines = Vec::new();
    for r in &reports {
        lines.push(r.line());
        lines.extend(r.failures.iter().map(|f| format!("    {f}")));
    }
    lines.push(format!(
        "{} of {} criteria passed",
        reports.len() - failed,
        reports.len()
    ));
    Ok(Outcome {
        report: Report::new(
            json!({ "criteria": ids, "tolerance_scale": scale }),
            json!({ "criteria": reports, "passed": failed == 0 }),
            json!({}),
        ),
        lines,
        failure: (failed > 0).then(|| Failure::Numerical(format!("{failed} criteria failed"))),
    })
}
