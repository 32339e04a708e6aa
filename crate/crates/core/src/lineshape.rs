//! Complex gas response from line parameters.
//!
//! Each line contributes an area-normalized complex Voigt profile
//! `Ṽ(ν) = w(z) / (√π γ_D)` with `z = (ν - ν_c + iγ_L) / γ_D`, where `ν_c`
//! is the pressure-shifted centre, `γ_D` the Doppler 1/e half width and
//! `γ_L` the Lorentz half width. The field transmitted through a cell of
//! length `L` holding `N` absorbers per cm³ is
//!
//! ```text
//! √η · e^{iφ} = exp(-½ N L Σ S Ṽ_re + i ½ N L Σ S Ṽ_im)
//! ```
//!
//! so `φ` is positive on the high-wavenumber side of an isolated line.
//! Intensities are used as tabulated at 296 K.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::CombConfig;
use crate::error::{domain, Error, Result};
use crate::hitran::SpectralLine;
use crate::numerics::faddeeva;

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT_KG: f64 = 1.660_539_066_60e-27;
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;
pub const STANDARD_ATMOSPHERE_PA: f64 = 101_325.0;
/// Temperature at which line intensities and widths are tabulated.
pub const REFERENCE_TEMPERATURE: f64 = 296.0;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Cell contents and geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GasConditions {
    /// Total pressure, atm.
    pub pressure_total: f64,
    /// Absorber mole fraction.
    pub mole_fraction: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Path length, cm.
    pub path_length: f64,
}

impl Default for GasConditions {
    /// One part per thousand at 1 atm and 296 K in a 1 cm cell.
    fn default() -> Self {
        Self {
            pressure_total: 1.0,
            mole_fraction: 1.0e-3,
            temperature: REFERENCE_TEMPERATURE,
            path_length: 1.0,
        }
    }
}

impl GasConditions {
    /// An empty cell and a zero path length are both allowed.
    pub fn validate(&self) -> Result<()> {
        if !(self.pressure_total.is_finite() && self.pressure_total > 0.0) {
            return domain(format!(
                "pressure must be positive, got {} atm",
                self.pressure_total
            ));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return domain(format!(
                "temperature must be positive, got {} K",
                self.temperature
            ));
        }
        if !(0.0..=1.0).contains(&self.mole_fraction) {
            return domain(format!(
                "mole fraction must lie in [0, 1], got {}",
                self.mole_fraction
            ));
        }
        if !(self.path_length.is_finite() && self.path_length >= 0.0) {
            return domain(format!(
                "path length must be non-negative, got {} cm",
                self.path_length
            ));
        }
        Ok(())
    }

    /// Absorber number density, molecules/cm³.
    pub fn number_density(&self) -> f64 {
        let pascal = self.pressure_total * STANDARD_ATMOSPHERE_PA;
        self.mole_fraction * pascal / (BOLTZMANN * self.temperature) * 1.0e-6
    }
}

/// Isotopologue masses in atomic mass units, keyed by HITRAN ids.
const MOLECULAR_MASSES: &[(u8, u8, f64)] = &[
    (1, 1, 18.010_565),  // H2(16)O
    (1, 2, 20.014_811),  // H2(18)O
    (2, 1, 43.989_830),  // (12)C(16)O2
    (2, 2, 44.993_185),  // (13)C(16)O2
    (5, 1, 27.994_915),  // (12)C(16)O
    (6, 1, 16.031_300),  // (12)CH4
    (26, 1, 26.015_650), // (12)C2H2
    (26, 2, 27.019_005), // H(12)C(13)CH
    (26, 3, 27.021_825), // H(12)C(12)CD
];

/// Mass of one isotopologue in atomic mass units.
pub fn molecular_mass(molecule_id: u8, isotopologue_id: u8) -> Result<f64> {
    MOLECULAR_MASSES
        .iter()
        .find(|(m, i, _)| *m == molecule_id && *i == isotopologue_id)
        .map(|(_, _, mass)| *mass)
        .ok_or(Error::UnknownSpecies {
            molecule_id,
            isotopologue_id,
        })
}

/// Voigt parameters of one line under given conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineShape {
    /// Pressure-shifted line centre, cm⁻¹.
    pub center: f64,
    /// Doppler 1/e half width, cm⁻¹.
    pub doppler_width: f64,
    /// Lorentz half width at half maximum, cm⁻¹.
    pub lorentz_width: f64,
}

impl LineShape {
    pub fn new(line: &SpectralLine, cond: &GasConditions) -> Result<Self> {
        let mass = molecular_mass(line.molecule_id, line.isotopologue_id)?;
        Self::with_mass(line, cond, mass)
    }

    /// As [`LineShape::new`] with an explicit molecular mass in amu.
    pub fn with_mass(line: &SpectralLine, cond: &GasConditions, mass_amu: f64) -> Result<Self> {
        cond.validate()?;
        if !(mass_amu.is_finite() && mass_amu > 0.0) {
            return domain(format!("molecular mass must be positive, got {mass_amu}"));
        }
        if !(line.nu0 > 0.0 && line.gamma_air > 0.0 && line.gamma_self >= 0.0) {
            return domain(format!("non-physical line parameters at {} cm-1", line.nu0));
        }
        let p = cond.pressure_total;
        let x = cond.mole_fraction;
        let center = line.nu0 + line.delta_air * p;
        let thermal = 2.0 * BOLTZMANN * cond.temperature
            / (mass_amu * ATOMIC_MASS_UNIT_KG * SPEED_OF_LIGHT_M_S * SPEED_OF_LIGHT_M_S);
        let doppler_width = line.nu0 * thermal.sqrt();
        let lorentz_width = p
            * (line.gamma_air * (1.0 - x) + line.gamma_self * x)
            * (REFERENCE_TEMPERATURE / cond.temperature).powf(line.n_air);
        if !(doppler_width > 0.0 && lorentz_width.is_finite() && lorentz_width > 0.0) {
            return domain("line widths must be positive");
        }
        Ok(Self {
            center,
            doppler_width,
            lorentz_width,
        })
    }

    /// Area-normalized complex Voigt profile at `nu`, cm.
    pub fn profile(&self, nu: f64) -> Result<Complex64> {
        if !(nu.is_finite() && nu > 0.0) {
            return domain(format!("wavenumber must be positive, got {nu}"));
        }
        let z = Complex64::new(nu - self.center, self.lorentz_width) / self.doppler_width;
        Ok(faddeeva(z)? / (SQRT_PI * self.doppler_width))
    }
}

/// Complex Voigt profile of one line at `nu`.
pub fn voigt_complex(line: &SpectralLine, cond: &GasConditions, nu: f64) -> Result<Complex64> {
    LineShape::new(line, cond)?.profile(nu)
}

/// Field transmission of the cell at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexTransmission {
    /// Amplitude transmission √η.
    pub sqrt_eta: f64,
    /// Dispersion phase, radians.
    pub phi: f64,
}

impl ComplexTransmission {
    pub const UNITY: Self = Self {
        sqrt_eta: 1.0,
        phi: 0.0,
    };

    pub fn eta(&self) -> f64 {
        self.sqrt_eta * self.sqrt_eta
    }
}

/// A cell holding one or more absorbing lines. Absorbances add.
#[derive(Debug, Clone)]
pub struct Absorber {
    shapes: Vec<(f64, LineShape)>,
    column: f64,
}

impl Absorber {
    pub fn new(lines: &[SpectralLine], cond: &GasConditions) -> Result<Self> {
        cond.validate()?;
        let shapes = lines
            .iter()
            .map(|line| Ok((line.intensity, LineShape::new(line, cond)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shapes,
            column: cond.number_density() * cond.path_length,
        })
    }

    pub fn from_shapes(shapes: Vec<(f64, LineShape)>, cond: &GasConditions) -> Result<Self> {
        cond.validate()?;
        Ok(Self {
            shapes,
            column: cond.number_density() * cond.path_length,
        })
    }

    pub fn shapes(&self) -> &[(f64, LineShape)] {
        &self.shapes
    }

    pub fn transmission(&self, nu: f64) -> Result<ComplexTransmission> {
        let mut profile = Complex64::new(0.0, 0.0);
        for (intensity, shape) in &self.shapes {
            profile += *intensity * shape.profile(nu)?;
        }
        let half_depth = 0.5 * self.column * profile;
        Ok(ComplexTransmission {
            sqrt_eta: (-half_depth.re).exp(),
            phi: half_depth.im,
        })
    }
}

/// Field transmission through a cell holding a single line.
pub fn complex_transmission(
    line: &SpectralLine,
    cond: &GasConditions,
    nu: f64,
) -> Result<ComplexTransmission> {
    Absorber::new(std::slice::from_ref(line), cond)?.transmission(nu)
}

/// Gas response seen by the sideband pair `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToothResponse {
    pub n: u32,
    pub sqrt_eta_plus: f64,
    pub sqrt_eta_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl ToothResponse {
    pub fn new(n: u32, plus: ComplexTransmission, minus: ComplexTransmission) -> Self {
        Self {
            n,
            sqrt_eta_plus: plus.sqrt_eta,
            sqrt_eta_minus: minus.sqrt_eta,
            phi_plus: plus.phi,
            phi_minus: minus.phi,
        }
    }

    /// Both teeth fully transmitted without phase shift.
    pub fn lossless(n: u32) -> Self {
        Self::new(n, ComplexTransmission::UNITY, ComplexTransmission::UNITY)
    }

    /// Dispersion-free pair with the given intensity transmissions.
    pub fn from_etas(n: u32, eta_plus: f64, eta_minus: f64) -> Self {
        Self {
            n,
            sqrt_eta_plus: eta_plus.sqrt(),
            sqrt_eta_minus: eta_minus.sqrt(),
            phi_plus: 0.0,
            phi_minus: 0.0,
        }
    }

    pub fn eta_plus(&self) -> f64 {
        self.sqrt_eta_plus * self.sqrt_eta_plus
    }

    pub fn eta_minus(&self) -> f64 {
        self.sqrt_eta_minus * self.sqrt_eta_minus
    }

    /// Δφ = φ₊ − φ₋.
    pub fn delta_phi(&self) -> f64 {
        self.phi_plus - self.phi_minus
    }
}

/// Gas response at every tooth pair `n = 0..=(n_teeth-1)/2` of the comb.
pub fn sample_teeth(
    lines: &[SpectralLine],
    cond: &GasConditions,
    comb: &CombConfig,
) -> Result<Vec<ToothResponse>> {
    comb.validate()?;
    let absorber = Absorber::new(lines, cond)?;
    sample_absorber(&absorber, comb)
}

pub fn sample_absorber(absorber: &Absorber, comb: &CombConfig) -> Result<Vec<ToothResponse>> {
    comb.validate()?;
    (0..=comb.max_index())
        .into_par_iter()
        .map(|n| {
            let (upper, lower) = comb.tooth_wavenumbers(n);
            let plus = absorber.transmission(upper)?;
            let minus = if n == 0 {
                plus
            } else {
                absorber.transmission(lower)?
            };
            Ok(ToothResponse::new(n, plus, minus))
        })
        .collect()
}

/// Lorentzian line centre value `1/(πγ_L)`, the zero-Doppler peak.
pub fn lorentz_peak(lorentz_width: f64) -> f64 {
    1.0 / (PI * lorentz_width)
}
