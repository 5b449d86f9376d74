//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use resonance_atlas::{make_params, CouplingFamily, ModelParams};

/// Parameters of the narrow-continuum pair used throughout the benchmarks.
pub fn narrow() -> (ModelParams, CouplingFamily) {
    (
        make_params(0.1, 0.01, 0.25).expect("valid parameters"),
        CouplingFamily::lorentzian_squared(),
    )
}

/// A point near the atomic resonance, just below the real axis.
pub fn near_atomic() -> Complex64 {
    Complex64::new(1.285, -2.7e-6)
}
