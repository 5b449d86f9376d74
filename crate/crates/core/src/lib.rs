//! Complex-energy resonances of a two-level system coupled to a continuum.
//!
//! The crate evaluates the resolvent function of the coupled system and its
//! continuation through the positive real axis, locates and tracks its zeros,
//! classifies them, and solves for the coupling at which two of them merge.

pub mod acceptance;
pub mod continuation;
pub mod discrete;
pub mod error;
pub mod family;
pub mod hydrogen;
pub mod params;
pub mod quadrature;
pub mod rational;
pub mod resolvent;
pub mod rootfind;

pub use continuation::{
    classify, critical_coupling, regime_diagnose, track, Classification, ExceptionalPoint, Regime,
    RegimeReport, Trajectory, Vary,
};
pub use discrete::{
    discretized_matrix, dressed_eigenvalues, dressed_eigenvectors, matrix_eigenvalues, min_gap,
    DressedPair,
};
pub use error::{AtlasError, Result};
pub use family::{CouplingFamily, FamilyKind, NormConvention, Pole};
pub use params::{make_params, ComplexEnergy, ModelParams};
pub use resolvent::{
    deriv_zeta, eval_f, eval_f_hydrogen, eval_f_plus, eval_f_plus_contour, residue_closed_form,
    ContinuationMethod, EvalOptions, FnKind, Sheet,
};
pub use rootfind::{find_all, negative_real_eigenvalue, newton, Label, RootResult, SeedStrategy};
