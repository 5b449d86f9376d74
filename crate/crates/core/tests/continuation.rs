use num_complex::Complex64;
use proptest::prelude::*;
use resonance_atlas::continuation::{
    geometric_grid, resonance_pair, track_grid, TrackOptions, STANDARD_RADIUS,
};
use resonance_atlas::rootfind::NewtonOptions;
use resonance_atlas::{
    classify, critical_coupling, dressed_eigenvalues, make_params, newton, regime_diagnose, track,
    CouplingFamily, EvalOptions, Label, Regime, Vary,
};

fn lor() -> CouplingFamily {
    CouplingFamily::lorentzian_squared()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn there_and_back(target in 0.0f64..0.6) {
        prop_assume!((target - 0.25).abs() > 0.02);
        let p = make_params(0.1, 0.01, 0.25).unwrap();
        let opts = EvalOptions::default();
        let z0 = newton(&p, &lor(), Complex64::new(1.285, 0.0), &NewtonOptions::default(), &opts).unwrap().zeta;
        let out = track(&p, &lor(), Vary::Delta, target, 40, z0, &opts).unwrap();
        let back = track(&p.with_delta(target).unwrap(), &lor(), Vary::Delta, 0.25, 40, out.last().zeta, &opts).unwrap();
        prop_assert!((back.last().zeta - z0).norm() < 1e-8);
    }
}

#[test]
fn small_width_limit_matches_dressed_pair() {
    let p = make_params(0.1, 0.01, 0.25).unwrap();
    let opts = EvalOptions::default();
    let pair = resonance_pair(&p, &lor(), &opts).unwrap();
    let dressed = dressed_eigenvalues(1, 0.1, 0.25).unwrap();
    let grid = geometric_grid(0.01, 1e-4, 40);
    for (z, want) in pair.iter().zip([dressed.zeta_minus, dressed.zeta_plus]) {
        let t = track_grid(
            &p,
            &lor(),
            Vary::Mu,
            &grid,
            *z,
            &TrackOptions::default(),
            &opts,
        )
        .into_result()
        .unwrap();
        let end = t.last().zeta;
        assert!((end - want).norm() < 1e-3, "{end} vs {want}");
    }
}

#[test]
fn classification_limits() {
    let p = make_params(0.1, 0.01, 0.25).unwrap();
    let opts = EvalOptions::default();
    for seed in [1.285, 0.963] {
        let z = newton(
            &p,
            &lor(),
            Complex64::new(seed, -1e-4),
            &NewtonOptions::default(),
            &opts,
        )
        .unwrap();
        let cls = classify(&p, &lor(), &z, 10, &opts).unwrap();
        match cls.label {
            Label::Standard => assert!((cls.limit - 1.25).norm() <= STANDARD_RADIUS),
            Label::Nonstandard => {
                let d = (cls.limit - Complex64::new(1.0, -0.01))
                    .norm()
                    .min((cls.limit - 1.0).norm());
                assert!(d < 1e-3, "{}", cls.limit);
            }
            Label::Unclassified => panic!("unclassified zero at {}", z.zeta),
        }
    }
}

#[test]
fn pair_merges_at_the_exceptional_point() {
    let opts = EvalOptions::default();
    let ep = critical_coupling(0.01, &lor(), None, &opts).unwrap();
    let p = make_params(ep.kappa_c, 0.01, ep.delta_c).unwrap();
    let mut found = Vec::new();
    for dir in [Complex64::new(1e-3, 0.0), Complex64::new(-1e-3, 0.0)] {
        let r = newton(
            &p,
            &lor(),
            ep.zeta_c + dir,
            &NewtonOptions::default(),
            &opts,
        )
        .unwrap();
        found.push(r.zeta);
    }
    assert!((found[0] - found[1]).norm() < 1e-6, "{found:?}");
    assert!((found[0] - ep.zeta_c).norm() < 1e-6);
}

#[test]
fn regime_is_monotone_in_coupling() {
    let opts = EvalOptions::default();
    let weak = make_params(0.0029, 0.01, 0.0).unwrap();
    let strong = make_params(0.0031, 0.01, 0.0).unwrap();
    let r = |p| {
        regime_diagnose(&p, &lor(), (-0.02, 0.02), 81, &opts)
            .unwrap()
            .regime
    };
    assert_eq!(r(weak), Regime::WeakCoupling);
    assert_eq!(r(strong), Regime::StrongCoupling);
    let wide = make_params(0.1, 0.01, 0.0).unwrap();
    assert_eq!(
        regime_diagnose(&wide, &lor(), (-0.3, 0.3), 121, &opts)
            .unwrap()
            .regime,
        Regime::StrongCoupling
    );
}
