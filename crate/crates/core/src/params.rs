//! Model parameters and the complex-energy type shared across the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, AtlasError, Result};

/// Dimensionless complex energy, in units of the continuum's peak photon
/// energy (two-level model) or of the level spacing (hydrogen).
pub type ComplexEnergy = Complex64;

/// Rejects NaN and infinite components.
pub fn ensure_finite(zeta: ComplexEnergy) -> Result<ComplexEnergy> {
    if zeta.re.is_finite() && zeta.im.is_finite() {
        Ok(zeta)
    } else {
        Err(AtlasError::Domain(format!("non-finite energy {zeta}")))
    }
}

/// Dimensionless knobs of the two-level resolvent.
///
/// `kappa` is the coupling in units of the peak photon energy, `mu` the
/// relative half-width of the coupling function and `delta` the detuning of
/// the excited level from the peak photon energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub mu: f64,
    pub delta: f64,
    /// Peak photon energy in eV; only used to convert results to physical units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_scale: Option<f64>,
}

impl ModelParams {
    pub fn new(kappa: f64, mu: f64, delta: f64) -> Result<Self> {
        if !(kappa.is_finite() && mu.is_finite() && delta.is_finite()) {
            return domain("parameters must be finite");
        }
        if mu <= 0.0 {
            return domain(format!("width mu must be positive, got {mu}"));
        }
        if kappa < 0.0 {
            return domain(format!("coupling kappa must be non-negative, got {kappa}"));
        }
        if delta <= -1.0 {
            return domain(format!("detuning delta must exceed -1, got {delta}"));
        }
        Ok(Self {
            kappa,
            mu,
            delta,
            energy_scale: None,
        })
    }

    pub fn with_energy_scale(mut self, ev: f64) -> Result<Self> {
        if !(ev.is_finite() && ev > 0.0) {
            return domain(format!("energy scale must be positive, got {ev}"));
        }
        self.energy_scale = Some(ev);
        Ok(self)
    }

    /// Bare excited-level energy `1 + delta`.
    pub fn level(&self) -> f64 {
        1.0 + self.delta
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        let p = Self::new(kappa, self.mu, self.delta)?;
        Ok(Self {
            energy_scale: self.energy_scale,
            ..p
        })
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        let p = Self::new(self.kappa, mu, self.delta)?;
        Ok(Self {
            energy_scale: self.energy_scale,
            ..p
        })
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        let p = Self::new(self.kappa, self.mu, delta)?;
        Ok(Self {
            energy_scale: self.energy_scale,
            ..p
        })
    }
}

/// Validating constructor mirroring [`ModelParams::new`].
pub fn make_params(kappa: f64, mu: f64, delta: f64) -> Result<ModelParams> {
    ModelParams::new(kappa, mu, delta)
}
