use num_complex::Complex64;
use resonance_atlas::hydrogen::{
    circular_profile, g2_profile, hydrogen_resonances, lifetime_seconds, mu_lower_bound, transition,
};
use resonance_atlas::quadrature::{integrate, integrate_tail, QuadTol};
use resonance_atlas::{eval_f_hydrogen, CouplingFamily, EvalOptions};

#[test]
fn n2_profile_matches_closed_form() {
    let p = circular_profile(2).unwrap().normalized();
    for y in [0.01, 0.3, 1.0, 2.5, 40.0] {
        let v: f64 = p.eval(y);
        assert!(
            (v.abs() - g2_profile(y).abs()).abs() <= 1e-14 * g2_profile(y).abs(),
            "{y}"
        );
    }
}

#[test]
fn n2_weighted_norm_is_one() {
    let g2 = |y: f64| 2.0 * g2_profile(y).powi(2) / y;
    let tol = QuadTol::default();
    let body = integrate(g2, 0.0, 1.0, &[], tol).unwrap().value;
    let tail = integrate_tail(g2, 1.0, 1.0, tol).unwrap().value;
    assert!((body + tail - 1.0).abs() < 1e-10, "{}", body + tail);
}

#[test]
fn widths_stay_above_the_bound() {
    let bound = mu_lower_bound();
    for n in 2..=60 {
        let t = transition(n).unwrap();
        assert!(t.mu_n > 274.0 && t.mu_n >= bound, "n = {n}");
    }
    let ratio = transition(2).unwrap().mu_n / bound;
    assert!((ratio - 2.0).abs() < 0.02);
}

#[test]
fn couplings_do_not_grow() {
    let k: Vec<f64> = [2, 10, 50]
        .iter()
        .map(|n| transition(*n).unwrap().kappa_n)
        .collect();
    assert!((k[0] - 0.017951).abs() < 1e-5);
    assert!((k[1] - 0.021657).abs() < 1e-5);
    assert!((k[2] - 0.027972).abs() < 1e-5);
    assert!(k.iter().all(|x| *x > 0.01 && *x < 0.04));
}

#[test]
fn only_lower_pole_is_minus_i() {
    for n in [2, 3, 7] {
        let f = CouplingFamily::hydrogen_circular(n).unwrap();
        let poles = f.weight_poles(1.0);
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].at, Complex64::new(0.0, -1.0));
        assert_eq!(poles[0].order, 4 * n - 4);
    }
}

#[test]
fn both_n2_zeros() {
    let opts = EvalOptions::default();
    let r = hydrogen_resonances(2, &opts).unwrap();
    let s = r.standard.zeta;
    assert!((s.re - 1.0).abs() < 1e-5);
    assert!((s.im + 2.0216e-8).abs() < 1e-11, "{s}");
    let ns = r.nonstandard.unwrap().zeta;
    assert!((ns.re - 1.493).abs() < 0.01 * 1.493, "{ns}");
    assert!((ns.im + 544.0).abs() < 0.01 * 544.0, "{ns}");
    let t = &r.transition;
    for z in [s, ns] {
        let v = eval_f_hydrogen(2, t.kappa_n, t.mu_n, z, &opts).unwrap();
        assert!(v.norm() < 1e-12 * z.norm().max(1.0) * 10.0, "{z}: {v}");
    }
    let tau = lifetime_seconds(s, t, 2).unwrap();
    assert!((tau - 1.6e-9).abs() < 0.05 * 1.6e-9, "{tau}");
    assert!(lifetime_seconds(Complex64::new(1.0, 0.0), t, 2).is_err());
}
