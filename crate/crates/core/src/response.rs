//! Mean spectral power, its variance and the signal-to-noise ratio at each
//! sideband pair.
//!
//! With `κ = √η_d |α β| J_n(M)`, `Δφ = φ₊ − φ₋` and the LO offset
//! `Δφ_LO = φ₊ − φ_LO`, the classical beat power of pair `n` is, to first
//! order in `Δφ`,
//!
//! ```text
//! |I|²/κ² = cos²Δφ_LO (√η₊ + (−1)ⁿ√η₋)² + sin²Δφ_LO (√η₊ − (−1)ⁿ√η₋)²
//!         + 2(−1)ⁿ sin(2Δφ_LO) Δφ √(η₊η₋)
//! ```
//!
//! and the mean and variance of the measured power are
//!
//! ```text
//! ⟨S⟩  = |I|² + |β|²J²η_d(η₊+η₋)e^{−2s} + |β|²η_d(2−η₊−η₋) + (1−η_d)
//! Δ²S  = 2|β|⁴η_d²[J⁴(η₊+η₋)²e^{−4s} + (2−η₊−η₋)²] + 2(1−η_d)²
//! ```
//!
//! The carrier bin (`n = 0`) holds a single frequency rather than a pair, so
//! its power is weighted by ½ (see [`bin_weight`]).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::comb::{parity, CombConfig};
use crate::error::{domain, Error, Result};
pub use crate::lineshape::ToothResponse;

/// Beyond this |Δφ| rows are flagged as outside the weak-dispersion regime.
pub const DISPERSION_WARNING: f64 = 0.05;
/// Beyond this |Δφ| the first-order spectral density is refused.
pub const DISPERSION_LIMIT: f64 = 0.3;

/// LO phase offset `Δφ_LO = φ₊ − φ_LO`, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoPhase(f64);

impl LoPhase {
    /// Amplitude quadrature, `Δφ_LO = 0`.
    pub const X: Self = Self(0.0);
    /// Phase quadrature, `Δφ_LO = π/2`.
    pub const P: Self = Self(FRAC_PI_2);

    pub fn new(delta_phi_lo: f64) -> Result<Self> {
        if !delta_phi_lo.is_finite() {
            return domain("LO phase must be finite");
        }
        Ok(Self(delta_phi_lo))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `(cos a, sin a, sin 2a)`, exact on the `mπ/2` lattice.
    fn trig(self) -> (f64, f64, f64) {
        let quarter_turns = self.0 / FRAC_PI_2;
        if quarter_turns == quarter_turns.round() && quarter_turns.abs() < 1e15 {
            return match (quarter_turns as i64).rem_euclid(4) {
                0 => (1.0, 0.0, 0.0),
                1 => (0.0, 1.0, 0.0),
                2 => (-1.0, 0.0, 0.0),
                _ => (0.0, -1.0, 0.0),
            };
        }
        let (sin, cos) = self.0.sin_cos();
        (cos, sin, (2.0 * self.0).sin())
    }
}

/// Which quadrature carries the reported signal of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub fn phase(self) -> LoPhase {
        match self {
            Quadrature::X => LoPhase::X,
            Quadrature::P => LoPhase::P,
        }
    }
}

/// The three terms of the normalized classical spectral density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalTerms {
    /// `cos²Δφ_LO (√η₊ + (−1)ⁿ√η₋)²`
    pub amplitude: f64,
    /// `sin²Δφ_LO (√η₊ − (−1)ⁿ√η₋)²`
    pub phase: f64,
    /// `2(−1)ⁿ sin(2Δφ_LO) Δφ √(η₊η₋)`
    pub dispersion: f64,
}

impl ClassicalTerms {
    pub fn total(&self) -> f64 {
        self.amplitude + self.phase + self.dispersion
    }
}

/// Terms of `|I|²/κ²` for the pair, with the dispersion difference `delta_phi`.
pub fn classical_terms(
    tooth: &ToothResponse,
    lo: LoPhase,
    delta_phi: f64,
) -> Result<ClassicalTerms> {
    check_dispersion(delta_phi)?;
    let sign = parity(tooth.n);
    let (cos, sin, sin2) = lo.trig();
    let sum = tooth.sqrt_eta_plus + sign * tooth.sqrt_eta_minus;
    let diff = tooth.sqrt_eta_plus - sign * tooth.sqrt_eta_minus;
    Ok(ClassicalTerms {
        amplitude: cos * cos * sum * sum,
        phase: sin * sin * diff * diff,
        dispersion: 2.0 * sign * sin2 * delta_phi * tooth.sqrt_eta_plus * tooth.sqrt_eta_minus,
    })
}

/// Classical spectral power `|I_nΩ|²` of the pair.
pub fn classical_power(
    tooth: &ToothResponse,
    kappa: f64,
    lo: LoPhase,
    delta_phi: f64,
) -> Result<f64> {
    Ok(kappa * kappa * classical_terms(tooth, lo, delta_phi)?.total())
}

fn check_dispersion(delta_phi: f64) -> Result<()> {
    if !delta_phi.is_finite() || delta_phi.abs() > DISPERSION_LIMIT {
        return Err(Error::OutOfRegime {
            delta_phi,
            limit: DISPERSION_LIMIT,
        });
    }
    if delta_phi.abs() > DISPERSION_WARNING {
        log::warn!(
            "dispersion difference {delta_phi:.4} rad exceeds {DISPERSION_WARNING} rad; \
             first-order spectral density is approximate"
        );
    }
    Ok(())
}

/// LO offsets at which the classical power is extremal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoExtrema {
    /// Offset of both extrema from the `mπ/2` lattice, radians.
    pub shift: f64,
    /// Extremum near the amplitude quadrature, `shift`.
    pub x_phase: f64,
    /// Extremum near the phase quadrature, `shift + π/2`.
    pub p_phase: f64,
}

impl LoExtrema {
    /// Phase of maximum power for pair `n`: near X for even `n`, near P for odd.
    pub fn maximum(&self, n: u32) -> f64 {
        if n % 2 == 0 {
            self.x_phase
        } else {
            self.p_phase
        }
    }

    pub fn minimum(&self, n: u32) -> f64 {
        if n % 2 == 0 {
            self.p_phase
        } else {
            self.x_phase
        }
    }
}

/// Extremal LO offsets `½·atan(2Δφ / (1 + √(η₊/η₋)))` (+ `mπ/2`).
///
/// For `η₊ = η₋` this coincides with the stationary point of the first-order
/// spectral density, `½·atan(Δφ)` ([`stationary_shift`]); for unequal
/// transmissions the two differ at order `Δφ·|1 − √(η₊/η₋)|`.
pub fn lo_extrema(eta_plus: f64, eta_minus: f64, delta_phi: f64) -> Result<LoExtrema> {
    for (name, eta) in [("eta_plus", eta_plus), ("eta_minus", eta_minus)] {
        if !(eta > 0.0 && eta <= 1.0) {
            return domain(format!("{name} must lie in (0, 1], got {eta}"));
        }
    }
    if !delta_phi.is_finite() {
        return domain("dispersion difference must be finite");
    }
    let shift = 0.5 * (2.0 * delta_phi / (1.0 + (eta_plus / eta_minus).sqrt())).atan();
    Ok(LoExtrema {
        shift,
        x_phase: shift,
        p_phase: shift + FRAC_PI_2,
    })
}

/// First-order form `Δφ / (1 + √(η₊/η₋))` of the extremum shift.
pub fn lo_extrema_shift_linear(eta_plus: f64, eta_minus: f64, delta_phi: f64) -> f64 {
    delta_phi / (1.0 + (eta_plus / eta_minus).sqrt())
}

/// Zero of `d|I|²/dΔφ_LO` for the first-order density: `tan 2Δφ_LO = Δφ`.
pub fn stationary_shift(delta_phi: f64) -> f64 {
    0.5 * delta_phi.atan()
}

/// Spectral weight of the analyzer bin: ½ for the single carrier frequency,
/// 1 for a sideband pair.
pub fn bin_weight(n: u32) -> f64 {
    if n == 0 {
        0.5
    } else {
        1.0
    }
}

/// `κ = √η_d |α β| J_n(M)`, signed with `J_n(M)`.
pub fn kappa(comb: &CombConfig, n: u32) -> Result<f64> {
    Ok(comb.eta_d.sqrt() * comb.alpha_mag * comb.beta_mag * comb.amplitude(n)?)
}

fn check_tooth(tooth: &ToothResponse, comb: &CombConfig) -> Result<()> {
    comb.validate()?;
    if tooth.n > comb.max_index() {
        return domain(format!(
            "tooth {} lies outside a comb of {} teeth",
            tooth.n, comb.n_teeth
        ));
    }
    for value in [tooth.sqrt_eta_plus, tooth.sqrt_eta_minus] {
        if !(0.0..=1.0).contains(&value) {
            return domain(format!(
                "amplitude transmission must lie in [0, 1], got {value}"
            ));
        }
    }
    if !(tooth.phi_plus.is_finite() && tooth.phi_minus.is_finite()) {
        return domain("tooth phases must be finite");
    }
    Ok(())
}

/// Mean spectral power `⟨S(nΩ)⟩` at LO offset `lo`.
pub fn mean_power(tooth: &ToothResponse, comb: &CombConfig, lo: LoPhase) -> Result<f64> {
    check_tooth(tooth, comb)?;
    let n = tooth.n;
    let j = comb.amplitude(n)?;
    let classical = classical_power(tooth, kappa(comb, n)?, lo, tooth.delta_phi())?;
    let (eta_p, eta_m) = (tooth.eta_plus(), tooth.eta_minus());
    let beta2 = comb.beta_mag * comb.beta_mag;
    let eta_d = comb.eta_d;
    let squeezed = beta2 * j * j * eta_d * (eta_p + eta_m) * (-2.0 * comb.squeeze_s).exp();
    let sample_loss = beta2 * eta_d * (1.0 - eta_p + 1.0 - eta_m);
    let detector_loss = 1.0 - eta_d;
    Ok(bin_weight(n) * (classical + squeezed + sample_loss + detector_loss))
}

/// Variance of the spectral power `Δ²S(nΩ)`.
pub fn variance(tooth: &ToothResponse, comb: &CombConfig) -> Result<f64> {
    check_tooth(tooth, comb)?;
    let n = tooth.n;
    let j = comb.amplitude(n)?;
    let (eta_p, eta_m) = (tooth.eta_plus(), tooth.eta_minus());
    let beta4 = comb.beta_mag.powi(4);
    let eta_d = comb.eta_d;
    let squeezed = j.powi(4) * (eta_p + eta_m).powi(2) * (-4.0 * comb.squeeze_s).exp();
    let sample_loss = (1.0 - eta_p + 1.0 - eta_m).powi(2);
    let value =
        2.0 * beta4 * eta_d * eta_d * (squeezed + sample_loss) + 2.0 * (1.0 - eta_d).powi(2);
    Ok(bin_weight(n).powi(2) * value)
}

/// Variance when symmetric teeth are two-mode squeezed instead.
///
/// ```text
/// Δ²S_TMS = 2|β|⁴η_d²{J⁴[3(η₊+η₋)⁴ − (η₊+η₋+2√(η₊η₋))²] cosh²(2s) + (2−η₊−η₋)²}
///         + 2(1−η_d)²
/// ```
///
/// Note that at `s = 0` the bracket does not reduce to the `(η₊+η₋)²` of
/// [`variance`] (for `η₊ = η₋ = η` it is `48η⁴ − 16η²` against `4η²`). The
/// expression is kept as stated; only its growth with `s` is relied on.
pub fn variance_tms(tooth: &ToothResponse, comb: &CombConfig) -> Result<f64> {
    check_tooth(tooth, comb)?;
    let n = tooth.n;
    let j = comb.amplitude(n)?;
    let (eta_p, eta_m) = (tooth.eta_plus(), tooth.eta_minus());
    let beta4 = comb.beta_mag.powi(4);
    let eta_d = comb.eta_d;
    let bracket = tms_bracket(eta_p, eta_m);
    let cosh2 = (2.0 * comb.squeeze_s).cosh().powi(2);
    let sample_loss = (1.0 - eta_p + 1.0 - eta_m).powi(2);
    let value = 2.0 * beta4 * eta_d * eta_d * (j.powi(4) * bracket * cosh2 + sample_loss)
        + 2.0 * (1.0 - eta_d).powi(2);
    Ok(bin_weight(n).powi(2) * value)
}

/// `3(η₊+η₋)⁴ − (η₊+η₋+2√(η₊η₋))²`
pub fn tms_bracket(eta_plus: f64, eta_minus: f64) -> f64 {
    let sum = eta_plus + eta_minus;
    3.0 * sum.powi(4) - (sum + 2.0 * (eta_plus * eta_minus).sqrt()).powi(2)
}

/// One line of the spectrum table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub squeeze_s: f64,
    /// Quadrature holding the larger classical power.
    pub quadrature: Quadrature,
    pub kappa: f64,
    pub classical_power: f64,
    pub mean_power: f64,
    pub variance: f64,
    /// `⟨S⟩ / ΔS`
    pub snr: f64,
    /// `snr / |α|`
    pub snr_normalized: f64,
    /// `ΔS_SQL / ΔS`, the noise reduction relative to `s = 0`.
    pub advantage: f64,
    pub delta_phi: f64,
    /// |Δφ| beyond [`DISPERSION_WARNING`].
    pub out_of_regime: bool,
}

/// Per-tooth mean, variance, SNR and quantum advantage.
///
/// The signal of each row is read at whichever quadrature extremum (X or P)
/// holds the larger classical power. Near a symmetric line this alternates
/// with the parity of `n`.
pub fn snr_table(teeth: &[ToothResponse], comb: &CombConfig) -> Result<Vec<SpectrumRow>> {
    comb.validate()?;
    if comb.alpha_mag <= 0.0 {
        return domain("normalized SNR needs a non-zero coherent amplitude");
    }
    let classical_comb = CombConfig {
        squeeze_s: 0.0,
        ..*comb
    };
    teeth
        .iter()
        .map(|tooth| {
            let n = tooth.n;
            let k = kappa(comb, n)?;
            let delta_phi = tooth.delta_phi();
            let x = classical_power(tooth, k, LoPhase::X, delta_phi)?;
            let p = classical_power(tooth, k, LoPhase::P, delta_phi)?;
            let quadrature = if x >= p { Quadrature::X } else { Quadrature::P };
            let mean = mean_power(tooth, comb, quadrature.phase())?;
            let var = variance(tooth, comb)?;
            let var_sql = variance(tooth, &classical_comb)?;
            let snr = ratio(mean, var.sqrt());
            let advantage = if var_sql == 0.0 && var == 0.0 {
                1.0
            } else {
                ratio(var_sql.sqrt(), var.sqrt())
            };
            Ok(SpectrumRow {
                n,
                squeeze_s: comb.squeeze_s,
                quadrature,
                kappa: k,
                classical_power: bin_weight(n) * x.max(p),
                mean_power: mean,
                variance: var,
                snr,
                snr_normalized: snr / comb.alpha_mag,
                advantage,
                delta_phi,
                out_of_regime: delta_phi.abs() > DISPERSION_WARNING,
            })
        })
        .collect()
}

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        if numerator == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator / denominator
    }
}
