use proptest::prelude::*;
use resonance_atlas::discrete::{characteristic, eigenvalue_curves};
use resonance_atlas::{
    discretized_matrix, dressed_eigenvalues, dressed_eigenvectors, matrix_eigenvalues, min_gap,
};

proptest! {
    #[test]
    fn resonant_splitting_is_two_kappa_root_n(n in 1u32..=3, kappa in 1e-4f64..2.0) {
        let pair = dressed_eigenvalues(n, kappa, 0.0).unwrap();
        let want = 2.0 * kappa * (n as f64).sqrt();
        prop_assert!((pair.splitting - want).abs() <= 4.0 * f64::EPSILON * want);
        prop_assert!(((pair.zeta_plus - pair.zeta_minus) - want).abs() <= 4.0 * f64::EPSILON * pair.zeta_plus);
    }

    #[test]
    fn pair_brackets_the_bare_levels(n in 1u32..=50, kappa in 0.0f64..1.0, delta in -2.0f64..2.0) {
        let pair = dressed_eigenvalues(n, kappa, delta).unwrap();
        let (lo, hi) = (n as f64 + delta.min(0.0), n as f64 + delta.max(0.0));
        prop_assert!(pair.zeta_minus <= lo + 1e-12 && pair.zeta_plus >= hi - 1e-12);
        prop_assert!((pair.zeta_minus + pair.zeta_plus - (2.0 * n as f64 + delta)).abs() < 1e-12 * n as f64);
    }

    #[test]
    fn eigenvectors_are_orthonormal_eigenpairs(n in 1u32..=20, kappa in 1e-3f64..1.0, delta in -1.0f64..1.0) {
        let pair = dressed_eigenvalues(n, kappa, delta).unwrap();
        let v = dressed_eigenvectors(n, kappa, delta).unwrap();
        let g = (n as f64).sqrt() * kappa;
        let nf = n as f64;
        for (amp, zeta) in v.iter().zip([pair.zeta_minus, pair.zeta_plus]) {
            prop_assert!((amp.atomic.hypot(amp.photonic) - 1.0).abs() < 1e-14);
            let r1 = (nf + delta) * amp.atomic + g * amp.photonic - zeta * amp.atomic;
            let r2 = g * amp.atomic + nf * amp.photonic - zeta * amp.photonic;
            prop_assert!(r1.abs() < 1e-12 * nf && r2.abs() < 1e-12 * nf);
        }
        prop_assert!((v[0].atomic * v[1].atomic + v[0].photonic * v[1].photonic).abs() < 1e-14);
    }

    #[test]
    fn spectrum_of_the_three_mode_matrix(kappa in 0.0f64..0.5, mu in 1e-3f64..0.5, delta in -0.5f64..0.5) {
        let m = discretized_matrix(kappa, mu, delta);
        let e = matrix_eigenvalues(&m);
        prop_assert!((e.iter().sum::<f64>() - (4.0 + delta)).abs() < 1e-12);
        let norm = m.norm();
        for l in e {
            prop_assert!(characteristic(&m, l).abs() <= 1e-10 * norm);
        }
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn large_detuning_limits() {
    let pair = dressed_eigenvalues(1, 0.1, 1e3).unwrap();
    assert!((pair.zeta_plus - 1001.0).abs() < 1e-5);
    assert!((pair.zeta_minus - 1.0).abs() < 1e-5);
    // The shifts are nκ²/δ to leading order.
    for n in [2, 3] {
        let pair = dressed_eigenvalues(n, 0.1, 1e3).unwrap();
        let shift = n as f64 * 0.01 / 1e3;
        assert!((pair.zeta_plus - (n as f64 + 1e3) - shift).abs() < 1e-9);
        assert!((n as f64 - pair.zeta_minus - shift).abs() < 1e-9);
    }
}

#[test]
fn resonant_pair_at_tenth_coupling() {
    let pair = dressed_eigenvalues(1, 0.1, 0.0).unwrap();
    assert!((pair.zeta_minus - 0.9).abs() < 1e-15);
    assert!((pair.zeta_plus - 1.1).abs() < 1e-15);
}

#[test]
fn avoided_crossings_shrink_with_coupling() {
    let strong = min_gap(0.1, 0.01, (-0.1, 0.1), 401).unwrap();
    let weak = min_gap(0.002, 0.01, (-0.1, 0.1), 401).unwrap();
    assert!(weak > 0.0 && weak < strong, "{weak} vs {strong}");
}

#[test]
fn curves_cover_the_grid() {
    let curves = eigenvalue_curves(0.002, 0.01, (-0.1, 0.1), 21).unwrap();
    assert_eq!(curves.len(), 21);
    assert_eq!(curves[0].0, -0.1);
    assert_eq!(curves[20].0, 0.1);
    assert!(eigenvalue_curves(0.1, 0.01, (0.0, 1.0), 1).is_err());
}
