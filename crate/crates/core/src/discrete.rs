//! Zero-width limits: dressed states of a single mode and the three-mode
//! discretization of the continuum.

use nalgebra::{Matrix4, SymmetricEigen};
use serde::Serialize;

use crate::error::{domain, AtlasError, Result};

/// Largest excitation number accepted by the dressed-state formulas.
pub const MAX_EXCITATION: u32 = 1000;

/// Components of a dressed state on `|1⟩⊗|k₀⟩^{n−1}` (atomic, energy `n+δ`)
/// and `|0⟩⊗|k₀⟩^n` (photonic, energy `n`), normalized to unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitudes {
    pub atomic: f64,
    pub photonic: f64,
}

/// The two eigenstates of the `n`-excitation block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedPair {
    pub n: u32,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    /// `√(δ² + 4nκ²)`, which equals `ζ₊ − ζ₋`.
    pub splitting: f64,
    /// `[minus, plus]`; `None` when the block is degenerate (`κ = δ = 0`).
    pub weight_mixing: Option<[Amplitudes; 2]>,
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_EXCITATION {
        return domain(format!(
            "excitation number must lie in 1..={MAX_EXCITATION}, got {n}"
        ));
    }
    Ok(())
}

/// `ζ_{∓,n} = n + (δ ∓ √(δ² + 4nκ²))/2`.
pub fn dressed_eigenvalues(n: u32, kappa: f64, delta: f64) -> Result<DressedPair> {
    check_n(n)?;
    let root = (delta * delta + 4.0 * n as f64 * kappa * kappa).sqrt();
    let nf = n as f64;
    let weight_mixing = dressed_eigenvectors(n, kappa, delta).ok();
    Ok(DressedPair {
        n,
        zeta_minus: nf + 0.5 * (delta - root),
        zeta_plus: nf + 0.5 * (delta + root),
        splitting: root,
        weight_mixing,
    })
}

/// Eigenvectors of `[[n+δ, √n κ], [√n κ, n]]`, with the photonic-to-atomic
/// ratio `√n κ/(ζ−n)`.
pub fn dressed_eigenvectors(n: u32, kappa: f64, delta: f64) -> Result<[Amplitudes; 2]> {
    check_n(n)?;
    let g = (n as f64).sqrt() * kappa;
    if g == 0.0 && delta == 0.0 {
        return Err(AtlasError::Degenerate(
            "the dressed block is a multiple of the identity".into(),
        ));
    }
    let root = (delta * delta + 4.0 * g * g).sqrt();
    // ζ − n for each state, and ζ − n − δ.
    let shifts = [0.5 * (delta - root), 0.5 * (delta + root)];
    let vec = |s: f64| {
        // Both (s, g) and (g, s − δ) solve the block; take the better
        // conditioned one.
        let (a, p) = if s.abs() >= (s - delta).abs() {
            (s, g)
        } else {
            (g, s - delta)
        };
        let norm = a.hypot(p);
        let sign = if a < 0.0 || (a == 0.0 && p < 0.0) {
            -1.0
        } else {
            1.0
        };
        Amplitudes {
            atomic: sign * a / norm,
            photonic: sign * p / norm,
        }
    };
    Ok([vec(shifts[0]), vec(shifts[1])])
}

/// The one-excitation Hamiltonian with the continuum replaced by the modes
/// `1−μ, 1, 1+μ` coupled with strengths `κ/2, κ, κ/2`, in the basis
/// `|1;0⟩, |0;k₋⟩, |0;k₀⟩, |0;k₊⟩`.
#[rustfmt::skip]
pub fn discretized_matrix(kappa: f64, mu: f64, delta: f64) -> Matrix4<f64> {
    let h = 0.5 * kappa;
    Matrix4::new(
        1.0 + delta, h, kappa, h,
        h, 1.0 - mu, 0.0, 0.0,
        kappa, 0.0, 1.0, 0.0,
        h, 0.0, 0.0, 1.0 + mu,
    )
}

/// Ascending eigenvalues of a symmetric 4×4 matrix.
pub fn matrix_eigenvalues(m: &Matrix4<f64>) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut v: [f64; 4] = eig.eigenvalues.into();
    v.sort_by(f64::total_cmp);
    v
}

/// `det(λI − M)`.
pub fn characteristic(m: &Matrix4<f64>, lambda: f64) -> f64 {
    (Matrix4::identity() * lambda - m).determinant()
}

/// Smallest gap between adjacent eigenvalues of [`discretized_matrix`] over
/// `steps` evenly spaced detunings.
pub fn min_gap(kappa: f64, mu: f64, delta_range: (f64, f64), steps: usize) -> Result<f64> {
    if steps < 2 {
        return domain("min_gap needs at least two detunings");
    }
    let (a, b) = delta_range;
    let gap = (0..steps)
        .map(|j| a + (b - a) * j as f64 / (steps - 1) as f64)
        .map(|d| {
            let e = matrix_eigenvalues(&discretized_matrix(kappa, mu, d));
            e.windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(gap)
}

/// Eigenvalues of [`discretized_matrix`] at each of `steps` detunings.
pub fn eigenvalue_curves(
    kappa: f64,
    mu: f64,
    delta_range: (f64, f64),
    steps: usize,
) -> Result<Vec<(f64, [f64; 4])>> {
    if steps < 2 {
        return domain("a detuning grid needs at least two points");
    }
    let (a, b) = delta_range;
    Ok((0..steps)
        .map(|j| a + (b - a) * j as f64 / (steps - 1) as f64)
        .map(|d| (d, matrix_eigenvalues(&discretized_matrix(kappa, mu, d))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;

    #[test]
    fn closed_form_pair() {
        let p = dressed_eigenvalues(1, 0.1, 0.25).unwrap();
        assert_relative_eq!(p.zeta_minus, 0.964_921_894_064_179, epsilon = 1e-14);
        assert_relative_eq!(p.zeta_plus, 1.285_078_105_935_821, epsilon = 1e-14);
        let p = dressed_eigenvalues(1, 0.1, 0.0).unwrap();
        assert_relative_eq!(p.zeta_minus, 0.9, epsilon = 1e-15);
        assert_relative_eq!(p.zeta_plus, 1.1, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_rabi_splitting() {
        for n in 1..=3u32 {
            let p = dressed_eigenvalues(n, 0.1, 0.0).unwrap();
            let want = 0.2 * (n as f64).sqrt();
            assert_relative_eq!(p.splitting, want, max_relative = 4.0 * f64::EPSILON);
            assert_relative_eq!(
                p.zeta_plus - p.zeta_minus,
                want,
                epsilon = 4.0 * f64::EPSILON * 3.5
            );
        }
    }

    #[test]
    fn free_limit_orders_the_bare_levels() {
        for (n, d) in [(1, 0.3), (2, -0.4), (3, 0.0)] {
            let p = dressed_eigenvalues(n, 0.0, d).unwrap();
            let nf = n as f64;
            assert_eq!(p.zeta_minus, nf.min(nf + d));
            assert_eq!(p.zeta_plus, nf.max(nf + d));
        }
    }

    #[test]
    fn excitation_number_is_checked() {
        assert!(dressed_eigenvalues(0, 0.1, 0.0).is_err());
        assert!(dressed_eigenvalues(1001, 0.1, 0.0).is_err());
        assert!(dressed_eigenvalues(1000, 0.1, 0.0).is_ok());
    }

    #[test]
    fn large_detuning_asymptotics() {
        let p = dressed_eigenvalues(1, 0.1, 1e3).unwrap();
        assert!((p.zeta_plus - 1001.0).abs() < 1e-5);
        assert!((p.zeta_minus - 1.0).abs() < 1e-5);
    }

    #[test]
    fn eigenvectors_match_direct_diagonalization() {
        for (n, k, d) in [
            (1, 0.1, 0.25),
            (2, 0.3, -0.1),
            (3, 0.05, 0.0),
            (5, 1.2, 2.0),
        ] {
            let g = (n as f64).sqrt() * k;
            let nf = n as f64;
            let m = Matrix2::new(nf + d, g, g, nf);
            let eig = SymmetricEigen::new(m);
            let pair = dressed_eigenvalues(n, k, d).unwrap();
            let states = dressed_eigenvectors(n, k, d).unwrap();
            for (zeta, s) in [(pair.zeta_minus, states[0]), (pair.zeta_plus, states[1])] {
                let j = (0..2)
                    .min_by(|a, b| {
                        (eig.eigenvalues[*a] - zeta)
                            .abs()
                            .total_cmp(&(eig.eigenvalues[*b] - zeta).abs())
                    })
                    .unwrap();
                assert_relative_eq!(eig.eigenvalues[j], zeta, epsilon = 1e-12);
                let col = eig.eigenvectors.column(j);
                let overlap = col[0] * s.atomic + col[1] * s.photonic;
                assert_relative_eq!(overlap.abs(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn resonant_mixing_is_even() {
        let [minus, plus] = dressed_eigenvectors(1, 0.1, 0.0).unwrap();
        for s in [minus, plus] {
            assert!((s.atomic.abs() - s.photonic.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_coupling_unmixes_the_states() {
        let [minus, plus] = dressed_eigenvectors(1, 1e-8, 0.25).unwrap();
        // ζ₊ → 1+δ is the atomic level and ζ₋ → 1 the photonic one.
        assert!(plus.photonic.abs() / plus.atomic.abs() < 1e-7);
        assert!(minus.atomic.abs() / minus.photonic.abs() < 1e-7);
    }

    #[test]
    fn degenerate_block_has_no_basis() {
        assert!(dressed_eigenvectors(1, 0.0, 0.0).is_err());
        assert!(dressed_eigenvalues(1, 0.0, 0.0)
            .unwrap()
            .weight_mixing
            .is_none());
    }

    #[test]
    fn matrix_layout() {
        let m = discretized_matrix(0.0, 0.01, 0.25);
        assert_eq!(matrix_eigenvalues(&m), [0.99, 1.0, 1.01, 1.25]);
        let m = discretized_matrix(0.1, 0.01, 0.0);
        assert_eq!(m, m.transpose());
        assert_eq!(m[(0, 2)], 0.1);
        assert_eq!(m[(0, 1)], 0.05);
        assert_eq!(m[(3, 3)], 1.01);
    }

    #[test]
    fn trace_and_characteristic_residual() {
        for d in [-0.5, -0.01, 0.0, 0.2, 3.0] {
            let m = discretized_matrix(0.1, 0.01, d);
            let e = matrix_eigenvalues(&m);
            assert!((e.iter().sum::<f64>() - (4.0 + d)).abs() < 1e-12);
            let scale = m.norm();
            for l in e {
                assert!(characteristic(&m, l).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn second_order_perturbation_at_large_detuning() {
        let (k, mu, d) = (0.1f64, 0.01, 3.0);
        let e = matrix_eigenvalues(&discretized_matrix(k, mu, d));
        let top = 1.0 + d;
        let shift = (0.25 * k * k) / (top - (1.0 - mu))
            + k * k / (top - 1.0)
            + (0.25 * k * k) / (top - (1.0 + mu));
        assert!((e[3] - (top + shift)).abs() < 1e-5);
    }

    #[test]
    fn curves_never_touch_when_coupled() {
        let strong = min_gap(0.1, 0.01, (-0.5, 0.5), 200).unwrap();
        let weak = min_gap(0.002, 0.01, (-0.5, 0.5), 200).unwrap();
        assert!(strong > 0.0 && weak > 0.0 && weak < strong);
        assert!(min_gap(0.1, 0.01, (0.0, 1.0), 1).is_err());
    }
}
