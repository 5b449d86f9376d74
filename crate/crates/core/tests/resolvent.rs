use num_complex::Complex64;
use proptest::prelude::*;
use resonance_atlas::quadrature::{integrate, integrate_tail, QuadTol};
use resonance_atlas::resolvent::{eval_f_plus_as_printed, lorentzian_jump, JumpConvention};
use resonance_atlas::{
    deriv_zeta, eval_f, eval_f_plus, eval_f_plus_contour, make_params, residue_closed_form,
    CouplingFamily, EvalOptions, FnKind, ModelParams,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lor() -> CouplingFamily {
    CouplingFamily::lorentzian_squared()
}

fn opts() -> EvalOptions {
    EvalOptions::default()
}

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.01f64..1.5, 0.005f64..2.0, -0.5f64..1.0).prop_map(|(k, m, d)| make_params(k, m, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schwarz_symmetry(p in params_strategy(), re in -1.0f64..3.0, im in 0.01f64..2.0) {
        let z = c(re, im);
        let up = eval_f(&p, &lor(), z, &opts()).unwrap();
        let down = eval_f(&p, &lor(), z.conj(), &opts()).unwrap();
        prop_assert!((down - up.conj()).norm() <= 1e-10 * (1.0 + up.norm()));
    }

    #[test]
    fn sheets_agree_above_the_axis(p in params_strategy(), re in -1.0f64..3.0, im in 1e-3f64..2.0) {
        let z = c(re, im);
        prop_assert_eq!(eval_f(&p, &lor(), z, &opts()).unwrap(), eval_f_plus(&p, &lor(), z, &opts()).unwrap());
    }

    #[test]
    fn closed_form_oracle(p in params_strategy(), re in -1.0f64..3.0, im in 0.01f64..2.0) {
        let z = c(re, im);
        let q = eval_f(&p, &lor(), z, &opts()).unwrap();
        let exact = residue_closed_form(&p, &lor(), z).unwrap();
        prop_assert!((q - exact).norm() <= 1e-10 * exact.norm().max(1.0), "{} vs {}", q, exact);
    }

    #[test]
    fn cut_continuity(p in params_strategy(), e in 0.5f64..1.5) {
        // Limits from each side, extrapolated one step back to the axis.
        let eps = 1e-7;
        let above = c(e, eps);
        let below = c(e, -eps);
        let fu = eval_f(&p, &lor(), above, &opts()).unwrap()
            - c(0.0, eps) * deriv_zeta(FnKind::F, &p, &lor(), above, &opts()).unwrap();
        let fl = eval_f_plus(&p, &lor(), below, &opts()).unwrap()
            + c(0.0, eps) * deriv_zeta(FnKind::FPlus, &p, &lor(), below, &opts()).unwrap();
        prop_assert!((fu - fl).norm() <= 1e-6, "{} vs {}", fu, fl);
    }

    #[test]
    fn jump_and_contour_agree_in_the_strip(p in params_strategy(), re in 0.6f64..1.4, frac in 0.1f64..0.5) {
        let z = c(re, -frac * p.mu);
        let jump = eval_f_plus(&p, &lor(), z, &opts()).unwrap();
        let contour = eval_f_plus_contour(&p, &lor(), z, &opts()).unwrap();
        prop_assert!((jump - contour).norm() <= 1e-8 * (1.0 + jump.norm()), "{} vs {}", jump, contour);
    }

    #[test]
    fn derivative_matches_central_difference(p in params_strategy(), re in 0.0f64..2.0, im in -0.5f64..0.5) {
        prop_assume!(im.abs() > 0.05);
        prop_assume!((c(re, im) - c(1.0, -p.mu)).norm() > 0.1);
        let z = c(re, im);
        let h = 1e-5;
        let f = |w| eval_f_plus(&p, &lor(), w, &opts()).unwrap();
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let d = deriv_zeta(FnKind::FPlus, &p, &lor(), z, &opts()).unwrap();
        prop_assert!((d - fd).norm() <= 1e-5 * (1.0 + d.norm()), "{} vs {}", d, fd);
    }

    #[test]
    fn weight_continuation_restricts_to_weight(p in params_strategy(), y in -3.0f64..5.0) {
        let family = lor();
        let w = family.weight(&p, y);
        let wc = family.weight_continuation(&p, c(y, 0.0)).unwrap();
        prop_assert!((wc - w).norm() <= 1e-14 * w.max(1e-300) + 1e-300);
    }
}

#[test]
fn closed_form_grid_for_both_oracle_sets() {
    for (k, m, d) in [(0.1, 0.01, 0.25), (1.0, 0.5, 0.0)] {
        let p = make_params(k, m, d).unwrap();
        for re in [0.0, 0.5, 1.0, 1.5, 2.0] {
            for im in [0.001, 0.01, 0.1, 0.5, 1.0] {
                let z = c(re, im);
                let q = eval_f(&p, &lor(), z, &opts()).unwrap();
                let exact = residue_closed_form(&p, &lor(), z).unwrap();
                assert!(
                    (q - exact).norm() <= 1e-10 * exact.norm(),
                    "{z}: {q} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn free_level_is_linear() {
    let p = make_params(0.0, 0.01, 0.25).unwrap();
    let z = c(0.3, -0.7);
    assert_eq!(eval_f_plus(&p, &lor(), z, &opts()).unwrap(), z - 1.25);
}

#[test]
fn printed_jump_flips_the_mirror_term() {
    let p = make_params(0.1, 2.0, 0.25).unwrap();
    let z = c(1.005, -2.095);
    let (derived, _) = lorentzian_jump(&p, z, JumpConvention::Derived);
    let (printed, _) = lorentzian_jump(&p, z, JumpConvention::AsPrinted);
    let mirror = 4.0 * c(0.0, 1.0) * 0.01 * 8.0 / (4.0 + (z + 1.0) * (z + 1.0)).powi(2);
    assert!((derived - printed - 2.0 * mirror).norm() < 1e-12 * mirror.norm());
    let sum = eval_f_plus(&p, &lor(), z, &opts()).unwrap();
    let alt = eval_f_plus_as_printed(&p, z, &opts()).unwrap();
    assert!((sum - alt - 2.0 * mirror).norm() < 1e-10 * mirror.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lorentzian_weight_has_unit_norm(mu in 1e-3f64..5.0) {
        let p = make_params(0.1, mu, 0.0).unwrap();
        let family = lor();
        let w = |y: f64| family.weight(&p, y);
        let tol = QuadTol::default();
        let left = integrate_tail(|t| w(2.0 - t), 1.0, mu, tol).unwrap().value;
        let right = integrate_tail(w, 1.0, mu, tol).unwrap().value;
        let total = 2.0 / (std::f64::consts::PI * mu) * (left + right);
        prop_assert!((total - 1.0).abs() < 1e-10, "{}", total);
    }

    #[test]
    fn density_has_unit_mass(mu in 1e-3f64..5.0) {
        let family = lor();
        let rho = |y: f64| family.density(mu, y);
        let tol = QuadTol::default();
        let body = integrate(rho, 0.0, 1.0, &[], tol).unwrap().value;
        let tail = integrate_tail(rho, 1.0, mu, tol).unwrap().value;
        prop_assert!((body + tail - 1.0).abs() < 1e-10, "{}", body + tail);
    }
}
