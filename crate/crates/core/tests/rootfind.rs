use num_complex::Complex64;
use proptest::prelude::*;
use resonance_atlas::resolvent::eval_f_real;
use resonance_atlas::rootfind::NewtonOptions;
use resonance_atlas::{
    eval_f_plus, find_all, make_params, negative_real_eigenvalue, newton, CouplingFamily,
    EvalOptions, SeedStrategy, Sheet,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lor() -> CouplingFamily {
    CouplingFamily::lorentzian_squared()
}

#[test]
fn first_figure_pair() {
    let p = make_params(0.1, 0.01, 0.25).unwrap();
    let opts = EvalOptions::default();
    let zeros = find_all(&p, &lor(), &SeedStrategy::default(), &opts).unwrap();
    let second: Vec<_> = zeros.iter().filter(|r| r.sheet == Sheet::Second).collect();
    assert!(second.len() >= 2);
    let near = |w: Complex64| {
        second
            .iter()
            .min_by(|a, b| (a.zeta - w).norm().total_cmp(&(b.zeta - w).norm()))
            .unwrap()
            .zeta
    };
    let at = near(c(1.285, 0.0));
    assert!(
        (at - c(1.285_116_383_9, -2.687_94e-6)).norm() < 1e-9,
        "{at}"
    );
    let ph = near(c(0.963, -1e-3));
    assert!(
        (ph.re - 0.963_016_78).abs() < 1e-7 && (ph.im + 9.8064e-4).abs() < 1e-8,
        "{ph}"
    );
    for z in [at, ph] {
        let v = eval_f_plus(&p, &lor(), z, &opts).unwrap();
        assert!(v.norm() <= 1e-12, "{z}: {}", v.norm());
    }
    for r in &zeros {
        let v = eval_f_plus(&p, &lor(), r.zeta, &opts).unwrap();
        assert!(v.norm() <= 1e-10, "{}: {}", r.zeta, v.norm());
    }
}

#[test]
fn third_zero_at_width_two() {
    let p = make_params(0.1, 2.0, 0.25).unwrap();
    let strategy = SeedStrategy {
        extra: vec![c(1.005, -2.095)],
        ..SeedStrategy::default()
    };
    let zeros = find_all(&p, &lor(), &strategy, &EvalOptions::default()).unwrap();
    assert!(zeros.iter().filter(|r| r.sheet == Sheet::Second).count() >= 3);
}

#[test]
fn uncoupled_level_is_the_only_zero() {
    let p = make_params(0.0, 0.01, 0.25).unwrap();
    let zeros = find_all(
        &p,
        &lor(),
        &SeedStrategy::default(),
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(zeros.len(), 1);
    assert_eq!(zeros[0].zeta, c(1.25, 0.0));
}

#[test]
fn residual_falls_superlinearly() {
    let p = make_params(0.1, 0.01, 0.25).unwrap();
    let r = newton(
        &p,
        &lor(),
        c(1.2, -0.02),
        &NewtonOptions::default(),
        &EvalOptions::default(),
    )
    .unwrap();
    let h = &r.history;
    assert!(h.len() >= 3);
    let rates: Vec<f64> = h
        .windows(2)
        .filter(|w| w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    assert!(rates.windows(2).rev().take(2).all(|w| w[1] < w[0]), "{h:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn negative_axis_is_real_and_increasing(kappa in 0.05f64..2.0, mu in 0.01f64..1.0, x in -50.0f64..-0.01) {
        let p = make_params(kappa, mu, 0.0).unwrap();
        let opts = EvalOptions::default();
        let a = eval_f_real(&p, &lor(), x, &opts).unwrap();
        let b = eval_f_real(&p, &lor(), x * 0.9, &opts).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn negative_root_is_a_sign_change(kappa in 1.2f64..3.0) {
        let p = make_params(kappa, 0.01, 0.25).unwrap();
        let opts = EvalOptions::default();
        let x = negative_real_eigenvalue(&p, &lor(), &opts).unwrap().expect("strong coupling has a root");
        prop_assert!(x < 0.0);
        let lo = eval_f_real(&p, &lor(), x * (1.0 + 1e-6), &opts).unwrap();
        let hi = eval_f_real(&p, &lor(), x * (1.0 - 1e-6), &opts).unwrap();
        prop_assert!(lo <= 0.0 && hi >= 0.0);
    }

    #[test]
    fn returned_zeros_reevaluate_small(kappa in 0.02f64..0.5, delta in -0.3f64..0.5) {
        let p = make_params(kappa, 0.05, delta).unwrap();
        let opts = EvalOptions::default();
        for r in find_all(&p, &lor(), &SeedStrategy::default(), &opts).unwrap() {
            let v = eval_f_plus(&p, &lor(), r.zeta, &opts).unwrap();
            prop_assert!(v.norm() <= 1e-10 * r.zeta.norm().max(1.0), "{}: {}", r.zeta, v.norm());
        }
    }
}
