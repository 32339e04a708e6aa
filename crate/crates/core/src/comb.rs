//! Probe and local-oscillator configuration, and the phase-modulated comb.
//!
//! Phase modulation at frequency `Ω` with depth `M` spreads the squeezed
//! carrier over teeth at `ω₀ ± nΩ` with amplitudes `J_n(M)` on the upper side
//! and `(-1)ⁿ J_n(M)` on the lower side.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{bessel_j, BesselOrder, MAX_ORDER};
use crate::SPEED_OF_LIGHT_CM_S;

/// Probe, modulator, local oscillator and detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombConfig {
    /// Carrier wavenumber, cm⁻¹.
    pub carrier_nu: f64,
    /// Modulation frequency Ω, Hz.
    pub omega_mod_hz: f64,
    /// Modulation depth M.
    pub depth: f64,
    /// Total tooth count, odd: the carrier plus symmetric pairs.
    pub n_teeth: u32,
    /// Squeezing factor s.
    pub squeeze_s: f64,
    /// Squeezing angle θ_s, radians. Only 0 is modeled.
    pub squeeze_theta: f64,
    /// Coherent amplitude |α|.
    pub alpha_mag: f64,
    /// Local-oscillator amplitude |β|.
    pub beta_mag: f64,
    /// Detector efficiency η_d.
    pub eta_d: f64,
}

impl Default for CombConfig {
    /// 33-tooth comb at Ω = 500 MHz and M = 2 on the ¹²C₂H₂ ν₁+ν₃ P(9) line,
    /// unit detector efficiency, no squeezing.
    fn default() -> Self {
        Self {
            carrier_nu: 6534.3634,
            omega_mod_hz: 500.0e6,
            depth: 2.0,
            n_teeth: 33,
            squeeze_s: 0.0,
            squeeze_theta: 0.0,
            alpha_mag: 1.0e4,
            beta_mag: 1.0e3,
            eta_d: 1.0,
        }
    }
}

impl CombConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_nu.is_finite() && self.carrier_nu > 0.0) {
            return domain(format!(
                "carrier wavenumber must be positive, got {}",
                self.carrier_nu
            ));
        }
        if !(self.omega_mod_hz.is_finite() && self.omega_mod_hz > 0.0) {
            return domain(format!(
                "modulation frequency must be positive, got {}",
                self.omega_mod_hz
            ));
        }
        if !(self.depth.is_finite() && self.depth >= 0.0) {
            return domain(format!(
                "modulation depth must be non-negative, got {}",
                self.depth
            ));
        }
        if self.n_teeth % 2 == 0 || self.n_teeth == 0 {
            return domain(format!(
                "tooth count must be odd and positive, got {}",
                self.n_teeth
            ));
        }
        if (self.n_teeth - 1) / 2 > MAX_ORDER {
            return domain(format!(
                "tooth count {} exceeds {}",
                self.n_teeth,
                2 * MAX_ORDER + 1
            ));
        }
        if !(self.squeeze_s.is_finite() && self.squeeze_s >= 0.0) {
            return domain(format!(
                "squeezing factor must be non-negative, got {}",
                self.squeeze_s
            ));
        }
        if !self.squeeze_theta.is_finite() {
            return domain("squeezing angle must be finite");
        }
        if self.squeeze_theta != 0.0 {
            return Err(Error::NotModeled(format!(
                "squeezing angle {} rad: the noise model assumes the squeezed quadrature \
                 is aligned with the measured one",
                self.squeeze_theta
            )));
        }
        for (name, value) in [("|alpha|", self.alpha_mag), ("|beta|", self.beta_mag)] {
            if !(value.is_finite() && value >= 0.0) {
                return domain(format!("{name} must be non-negative, got {value}"));
            }
        }
        if !(self.eta_d > 0.0 && self.eta_d <= 1.0) {
            return domain(format!(
                "detector efficiency must lie in (0, 1], got {}",
                self.eta_d
            ));
        }
        Ok(())
    }

    /// Largest sideband index `(n_teeth - 1) / 2`.
    pub fn max_index(&self) -> u32 {
        self.n_teeth.saturating_sub(1) / 2
    }

    /// Tooth spacing Ω/c in cm⁻¹.
    pub fn tooth_spacing(&self) -> f64 {
        self.omega_mod_hz / SPEED_OF_LIGHT_CM_S
    }

    /// Wavenumbers of the upper and lower tooth of pair `n`.
    pub fn tooth_wavenumbers(&self, n: u32) -> (f64, f64) {
        let offset = f64::from(n) * self.tooth_spacing();
        (self.carrier_nu + offset, self.carrier_nu - offset)
    }

    /// `J_n(M)` for this comb's depth.
    pub fn amplitude(&self, n: u32) -> Result<f64> {
        let order = i32::try_from(n)
            .map_err(|_| Error::Domain(format!("tooth index {n} out of range")))
            .and_then(BesselOrder::new)?;
        bessel_j(order, self.depth)
    }
}

/// Amplitude of the tooth pair at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToothAmplitude {
    pub n: u32,
    /// `J_n(M)`, carried by the upper tooth.
    pub amplitude: f64,
    /// `(-1)ⁿ`, the extra sign on the lower tooth.
    pub parity_factor: f64,
}

impl ToothAmplitude {
    pub fn upper(&self) -> f64 {
        self.amplitude
    }

    pub fn lower(&self) -> f64 {
        self.parity_factor * self.amplitude
    }
}

/// `J_n(M)` for `n = 0..=(n_teeth - 1)/2`.
pub fn tooth_amplitudes(comb: &CombConfig) -> Result<Vec<ToothAmplitude>> {
    comb.validate()?;
    (0..=comb.max_index())
        .map(|n| {
            Ok(ToothAmplitude {
                n,
                amplitude: comb.amplitude(n)?,
                parity_factor: parity(n),
            })
        })
        .collect()
}

/// Power carried by all emitted teeth, counting each side of a pair.
pub fn emitted_power(teeth: &[ToothAmplitude]) -> f64 {
    teeth
        .iter()
        .map(|t| {
            let weight = if t.n == 0 { 1.0 } else { 2.0 };
            weight * t.amplitude * t.amplitude
        })
        .sum()
}

/// `(-1)ⁿ`.
pub fn parity(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Squeezing level in dB to squeezing factor, with `e^{2s} = 10^{dB/10}`.
pub fn squeeze_db_to_s(level_db: f64) -> Result<f64> {
    if !(level_db.is_finite() && level_db >= 0.0) {
        return domain(format!(
            "squeezing level must be non-negative, got {level_db} dB"
        ));
    }
    Ok(level_db * std::f64::consts::LN_10 / 20.0)
}

/// Inverse of [`squeeze_db_to_s`].
pub fn squeeze_s_to_db(s: f64) -> f64 {
    20.0 * s / std::f64::consts::LN_10
}
