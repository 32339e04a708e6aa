//! Recovery of sideband transmissions from an LO phase sweep.
//!
//! The classical power of pair `n` swept over the LO offset is fitted to
//! `a·cos²Δφ_LO + b·sin²Δφ_LO + c·sin 2Δφ_LO`. The quadrature amplitudes are
//! `I_X = √a` and `I_P = √b`, and the amplitude transmissions follow from
//! `√η± = |I_X ± I_P| / 2κ` (with X and P exchanged for odd `n`).
//!
//! The quadrature amplitudes only fix the larger and the smaller of the two
//! transmissions. Which sideband is the brighter one is supplied as a
//! [`SidebandOrder`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::comb::CombConfig;
use crate::error::{domain, Error, Result};
use crate::response::bin_weight;

/// Fewest samples accepted in a sweep.
pub const MIN_TRACE_LEN: usize = 16;

/// Spectral power of one tooth pair against the LO offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweepTrace {
    n: u32,
    phases: Vec<f64>,
    powers: Vec<f64>,
}

impl PhaseSweepTrace {
    pub fn new(n: u32, phases: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if phases.len() != powers.len() {
            return domain(format!(
                "{} phases but {} power samples",
                phases.len(),
                powers.len()
            ));
        }
        check_grid(&phases)?;
        if powers.iter().any(|p| !p.is_finite()) {
            return domain("power samples must be finite");
        }
        Ok(Self { n, phases, powers })
    }

    /// Samples `power(Δφ_LO)` on [`sweep_grid`].
    pub fn sample(n: u32, points: usize, power: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let phases = sweep_grid(points)?;
        let powers = phases.iter().map(|&a| power(a)).collect::<Result<_>>()?;
        Self::new(n, phases, powers)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }
}

/// `points` equally spaced LO offsets on `[0, 2π)`.
pub fn sweep_grid(points: usize) -> Result<Vec<f64>> {
    if points < MIN_TRACE_LEN {
        return domain(format!(
            "a sweep needs at least {MIN_TRACE_LEN} points, got {points}"
        ));
    }
    Ok((0..points)
        .map(|i| TAU * i as f64 / points as f64)
        .collect())
}

pub(crate) fn check_grid(phases: &[f64]) -> Result<()> {
    if phases.len() < MIN_TRACE_LEN {
        return domain(format!(
            "a sweep needs at least {MIN_TRACE_LEN} points, got {}",
            phases.len()
        ));
    }
    if phases.iter().any(|&a| !(0.0..TAU).contains(&a)) {
        return domain("LO offsets must lie in [0, 2π)");
    }
    if phases.windows(2).any(|w| w[1] <= w[0]) {
        return domain("LO offsets must be strictly increasing");
    }
    Ok(())
}

/// Least-squares fit of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureFit {
    /// Coefficient `a` of `cos²Δφ_LO`.
    pub x_power: f64,
    /// Coefficient `b` of `sin²Δφ_LO`.
    pub p_power: f64,
    /// Coefficient `c` of `sin 2Δφ_LO`.
    pub dispersion: f64,
    /// Covariance of `(a, b)`.
    pub covariance: [[f64; 2]; 2],
    pub residual_rms: f64,
}

/// Quadrature amplitudes with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub i_x: f64,
    pub i_p: f64,
    pub se_x: f64,
    pub se_p: f64,
    /// Covariance of `(i_x, i_p)`.
    pub cov_xp: f64,
}

impl QuadratureEstimate {
    /// Point estimate without uncertainty.
    pub fn exact(i_x: f64, i_p: f64) -> Self {
        Self {
            i_x,
            i_p,
            se_x: 0.0,
            se_p: 0.0,
            cov_xp: 0.0,
        }
    }
}

/// Fits `a·cos² + b·sin² + c·sin 2` to the sweep.
pub fn fit_trace(trace: &PhaseSweepTrace) -> Result<QuadratureFit> {
    let basis = |a: f64| {
        let (sin, cos) = a.sin_cos();
        [cos * cos, sin * sin, 2.0 * sin * cos]
    };
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&a, &y) in trace.phases.iter().zip(&trace.powers) {
        let row = basis(a);
        for i in 0..3 {
            rhs[i] += row[i] * y;
            for j in 0..3 {
                normal[i][j] += row[i] * row[j];
            }
        }
    }
    let inverse = invert3(&normal).ok_or_else(|| {
        Error::InconsistentTrace("LO offsets do not resolve both quadratures".into())
    })?;
    let coef: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| inverse[i][j] * rhs[j]).sum());
    let rss: f64 = trace
        .phases
        .iter()
        .zip(&trace.powers)
        .map(|(&a, &y)| {
            let row = basis(a);
            let model: f64 = (0..3).map(|i| row[i] * coef[i]).sum();
            (y - model).powi(2)
        })
        .sum();
    let dof = (trace.phases.len() - 3) as f64;
    let sigma2 = rss / dof;
    Ok(QuadratureFit {
        x_power: coef[0],
        p_power: coef[1],
        dispersion: coef[2],
        covariance: [
            [sigma2 * inverse[0][0], sigma2 * inverse[0][1]],
            [sigma2 * inverse[1][0], sigma2 * inverse[1][1]],
        ],
        residual_rms: (rss / trace.phases.len() as f64).sqrt(),
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(det.abs() > 1e-12 * scale.powi(3)) {
        return None;
    }
    Some(adj.map(|row| row.map(|v| v / det)))
}

impl QuadratureFit {
    /// Quadrature amplitudes after removing a constant power `offset`.
    ///
    /// A slightly negative coefficient, within three standard errors or
    /// rounding of the trace scale, is read as zero. A coefficient that is not
    /// significant gets the standard error `√sd` rather than the linearized
    /// `sd / 2√a`, which diverges at zero.
    pub fn quadratures(&self, offset: f64) -> Result<QuadratureEstimate> {
        let a = self.x_power - offset;
        let b = self.p_power - offset;
        let scale = a.abs().max(b.abs()).max(offset.abs());
        roots(a, b, self.covariance, scale)
    }
}

/// Amplitudes of the floor-free quadrature powers `a`, `b` with covariance `cov`.
/// `scale` sets the rounding level below which a power counts as zero.
fn roots(a: f64, b: f64, cov: [[f64; 2]; 2], scale: f64) -> Result<QuadratureEstimate> {
    let var_a = cov[0][0].max(0.0);
    let var_b = cov[1][1].max(0.0);
    let root = |value: f64, var: f64, label: &str| -> Result<(f64, f64)> {
        let sd = var.sqrt();
        let rounding = 1e-12 * scale;
        let tolerance = (3.0 * sd).max(rounding);
        if value < -tolerance {
            return Err(Error::InconsistentTrace(format!(
                "{label} power {value:.6e} is negative beyond the noise tolerance {tolerance:.3e}"
            )));
        }
        let amp = if value > rounding { value.sqrt() } else { 0.0 };
        // below three standard errors the amplitude is only bounded by √sd
        let se = if value > 3.0 * sd && amp > 0.0 {
            sd / (2.0 * amp)
        } else {
            sd.sqrt()
        };
        Ok((amp, se))
    };
    let (i_x, se_x) = root(a, var_a, "X-quadrature")?;
    let (i_p, se_p) = root(b, var_b, "P-quadrature")?;
    let cov_xp = if a > 3.0 * var_a.sqrt() && b > 3.0 * var_b.sqrt() && i_x > 0.0 && i_p > 0.0 {
        cov[0][1] / (4.0 * i_x * i_p)
    } else {
        0.0
    };
    Ok(QuadratureEstimate {
        i_x,
        i_p,
        se_x,
        se_p,
        cov_xp,
    })
}

/// `(|I_X|, |I_P|)` of a sweep holding classical power only.
pub fn extract_quadratures(trace: &PhaseSweepTrace) -> Result<QuadratureEstimate> {
    fit_trace(trace)?.quadratures(0.0)
}

/// Which tooth of a pair is the more strongly transmitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SidebandOrder {
    /// `η₊ ≥ η₋`, as when the carrier sits above the line centre.
    #[default]
    UpperBrighter,
    /// `η₋ ≥ η₊`, as when the carrier sits below the line centre.
    LowerBrighter,
}

impl SidebandOrder {
    /// Ordering for a carrier at `carrier_nu` probing a line at `line_nu`.
    pub fn for_carrier(carrier_nu: f64, line_nu: f64) -> Self {
        if carrier_nu >= line_nu {
            SidebandOrder::UpperBrighter
        } else {
            SidebandOrder::LowerBrighter
        }
    }
}

/// Transmissions recovered from one tooth pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveredTransmission {
    pub n: u32,
    pub sqrt_eta_plus: f64,
    pub sqrt_eta_minus: f64,
    pub i_x: f64,
    pub i_p: f64,
    pub se_plus: f64,
    pub se_minus: f64,
    /// The estimate exceeded 1 and was clamped.
    pub clamped_plus: bool,
    pub clamped_minus: bool,
}

/// `√η± = |I_X ± I_P| / 2κ` with the brighter tooth on the upper side.
pub fn recover_transmission(
    i_x: f64,
    i_p: f64,
    kappa: f64,
    n: u32,
) -> Result<RecoveredTransmission> {
    recover_estimate(
        &QuadratureEstimate::exact(i_x, i_p),
        kappa,
        n,
        SidebandOrder::default(),
    )
}

/// Recovers both transmissions and propagates the quadrature uncertainties.
pub fn recover_estimate(
    estimate: &QuadratureEstimate,
    kappa: f64,
    n: u32,
    order: SidebandOrder,
) -> Result<RecoveredTransmission> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return domain(format!("normalization must be positive, got {kappa}"));
    }
    let &QuadratureEstimate {
        i_x,
        i_p,
        se_x,
        se_p,
        cov_xp,
    } = estimate;
    if !(i_x >= 0.0 && i_p >= 0.0 && i_x.is_finite() && i_p.is_finite()) {
        return domain("quadrature amplitudes must be finite and non-negative");
    }
    // even n: I_X ∝ √η₊ + √η₋; odd n: I_P is the sum
    let (sum, diff) = if n % 2 == 0 { (i_x, i_p) } else { (i_p, i_x) };
    let larger = (sum + diff) / (2.0 * kappa);
    let smaller = (sum - diff).abs() / (2.0 * kappa);
    let se_larger = (se_x * se_x + se_p * se_p + 2.0 * cov_xp).max(0.0).sqrt() / (2.0 * kappa);
    let se_smaller = (se_x * se_x + se_p * se_p - 2.0 * cov_xp).max(0.0).sqrt() / (2.0 * kappa);
    let ((plus, se_plus), (minus, se_minus)) = match order {
        SidebandOrder::UpperBrighter => ((larger, se_larger), (smaller, se_smaller)),
        SidebandOrder::LowerBrighter => ((smaller, se_smaller), (larger, se_larger)),
    };
    Ok(RecoveredTransmission {
        n,
        sqrt_eta_plus: plus.min(1.0),
        sqrt_eta_minus: minus.min(1.0),
        i_x,
        i_p,
        se_plus,
        se_minus,
        clamped_plus: plus > 1.0,
        clamped_minus: minus > 1.0,
    })
}

/// Mean quantum power in bin `n`, given the transmission sum `η₊ + η₋`.
pub fn noise_floor(comb: &CombConfig, n: u32, eta_sum: f64) -> Result<f64> {
    comb.validate()?;
    if !(0.0..=2.0).contains(&eta_sum) {
        return domain(format!(
            "transmission sum must lie in [0, 2], got {eta_sum}"
        ));
    }
    let j = comb.amplitude(n)?;
    let beta2 = comb.beta_mag * comb.beta_mag;
    let squeezed = beta2 * j * j * comb.eta_d * eta_sum * (-2.0 * comb.squeeze_s).exp();
    let sample_loss = beta2 * comb.eta_d * (2.0 - eta_sum);
    Ok(bin_weight(n) * (squeezed + sample_loss + 1.0 - comb.eta_d))
}

/// Smallest `κ²` relative to the noise floor that survives floor removal in
/// double precision.
pub const RESOLUTION: f64 = 1e-10;

/// Recovers the transmissions from a sweep of measured (mean) spectral power.
///
/// The floor falls linearly with `Σ = η₊ + η₋`, `F(Σ) = F₀ − γΣ`, and the two
/// quadrature powers add up to `2κ²Σ + 2F(Σ)` whatever the dispersion, so
/// `Σ` is solved for directly before the floor is removed. For teeth with
/// `κ² ≪ γ` the floor itself carries most of the information on `Σ`.
pub fn invert_trace(
    trace: &PhaseSweepTrace,
    comb: &CombConfig,
    kappa: f64,
    order: SidebandOrder,
) -> Result<RecoveredTransmission> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return domain(format!("normalization must be positive, got {kappa}"));
    }
    let fit = fit_trace(trace)?;
    let n = trace.n;
    let f0 = noise_floor(comb, n, 0.0)?;
    let gamma = 0.5 * (f0 - noise_floor(comb, n, 2.0)?);
    if kappa * kappa < RESOLUTION * f0 {
        return Err(Error::InconsistentTrace(format!(
            "tooth {n}: classical power {:.3e} is below the resolution of the noise floor {f0:.3e}",
            kappa * kappa
        )));
    }
    let gain = 2.0 * (kappa * kappa - gamma);
    if gain.abs() <= 1e-9 * (kappa * kappa).max(gamma) {
        return Err(Error::InconsistentTrace(format!(
            "tooth {n}: signal and noise floor respond equally to absorption"
        )));
    }
    let raw_sum = (fit.x_power + fit.p_power - 2.0 * f0) / gain;
    let eta_sum = raw_sum.clamp(0.0, 2.0);
    let floor = f0 - gamma * eta_sum;
    let a = fit.x_power - floor;
    let b = fit.p_power - floor;
    let cov = if eta_sum == raw_sum {
        // a and b both carry the fitted Σ: (a, b) → T(a, b) with T = [[1+r, r], [r, 1+r]]
        let r = gamma / gain;
        let t = [[1.0 + r, r], [r, 1.0 + r]];
        let c = fit.covariance;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..2)
                    .flat_map(|k| (0..2).map(move |l| (k, l)))
                    .map(|(k, l)| t[i][k] * c[k][l] * t[j][l])
                    .sum();
            }
        }
        out
    } else {
        fit.covariance
    };
    let scale = a.abs().max(b.abs()).max(floor.abs());
    recover_estimate(&roots(a, b, cov, scale)?, kappa, n, order)
}

/// Normalization measured from an empty-cell sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: u32,
    pub kappa: f64,
    pub se: f64,
}

/// Estimates `κ` from a sweep taken at full transmission.
///
/// With equal sidebands only the sum quadrature is lit (X for even `n`, P
/// for odd), and `κ` is half its amplitude. The dark quadrature is left out:
/// its estimate is the square root of pure noise and biased upward.
/// For the carrier bin this includes its ½ spectral weight, so the result
/// can be passed to [`invert_trace`] unchanged.
pub fn calibrate(trace: &PhaseSweepTrace, comb: &CombConfig) -> Result<Calibration> {
    let estimate = fit_trace(trace)?.quadratures(noise_floor(comb, trace.n, 2.0)?)?;
    let (bright, se) = if trace.n % 2 == 0 {
        (estimate.i_x, estimate.se_x)
    } else {
        (estimate.i_p, estimate.se_p)
    };
    let kappa = 0.5 * bright;
    if !(kappa > 0.0) {
        return Err(Error::InconsistentTrace(format!(
            "calibration sweep of tooth {} carries no classical power",
            trace.n
        )));
    }
    Ok(Calibration {
        n: trace.n,
        kappa,
        se: 0.5 * se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{
        classical_power, kappa as comb_kappa, mean_power, LoPhase, ToothResponse,
    };

    fn eq6_trace(tooth: &ToothResponse, kappa: f64, points: usize) -> PhaseSweepTrace {
        PhaseSweepTrace::sample(tooth.n, points, |a| {
            classical_power(tooth, kappa, LoPhase::new(a)?, tooth.delta_phi())
        })
        .unwrap()
    }

    #[test]
    fn exact_model_quadratures() {
        let kappa = 3.0;
        for (n, ep, em) in [(2u32, 0.81, 0.36), (3, 0.5, 0.9), (0, 1.0, 1.0)] {
            let tooth = ToothResponse::from_etas(n, ep, em);
            let est = extract_quadratures(&eq6_trace(&tooth, kappa, 64)).unwrap();
            let x = classical_power(&tooth, kappa, LoPhase::X, 0.0)
                .unwrap()
                .sqrt();
            let p = classical_power(&tooth, kappa, LoPhase::P, 0.0)
                .unwrap()
                .sqrt();
            assert!((est.i_x - x).abs() < 1e-9 && (est.i_p - p).abs() < 1e-9);
        }
    }

    #[test]
    fn balanced_even_pair_has_no_phase_quadrature() {
        let tooth = ToothResponse::from_etas(4, 0.7, 0.7);
        let est = extract_quadratures(&eq6_trace(&tooth, 2.0, 48)).unwrap();
        assert_eq!(est.i_p, 0.0);
        assert!((est.i_x - 2.0 * 2.0 * 0.7f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn recovery_examples() {
        let r = recover_transmission(4.0, 0.0, 2.0, 2).unwrap();
        assert_eq!((r.sqrt_eta_plus, r.sqrt_eta_minus), (1.0, 1.0));
        let r = recover_transmission(2.0, 2.0, 2.0, 2).unwrap();
        assert_eq!((r.sqrt_eta_plus, r.sqrt_eta_minus), (1.0, 0.0));
        let r = recover_estimate(
            &QuadratureEstimate::exact(2.0, 2.0),
            2.0,
            2,
            SidebandOrder::LowerBrighter,
        )
        .unwrap();
        assert_eq!((r.sqrt_eta_plus, r.sqrt_eta_minus), (0.0, 1.0));
        assert!(recover_transmission(1.0, 1.0, 0.0, 1).is_err());
        assert!(recover_transmission(1.0, 1.0, -1.0, 1).is_err());
    }

    #[test]
    fn overshoot_is_clamped() {
        let r = recover_transmission(4.2, 0.0, 2.0, 2).unwrap();
        assert_eq!(r.sqrt_eta_plus, 1.0);
        assert!(r.clamped_plus && r.clamped_minus);
        let r = recover_transmission(3.9, 0.0, 2.0, 2).unwrap();
        assert!(!r.clamped_plus);
    }

    #[test]
    fn round_trip_with_order() {
        let kappa = 1.7;
        for n in 1..=4u32 {
            for (ep, em) in [(0.3, 0.9), (0.95, 0.2), (0.64, 0.64)] {
                let tooth = ToothResponse::from_etas(n, ep, em);
                let est = extract_quadratures(&eq6_trace(&tooth, kappa, 40)).unwrap();
                let order = if ep >= em {
                    SidebandOrder::UpperBrighter
                } else {
                    SidebandOrder::LowerBrighter
                };
                let r = recover_estimate(&est, kappa, n, order).unwrap();
                assert!((r.sqrt_eta_plus - tooth.sqrt_eta_plus).abs() < 1e-8);
                assert!((r.sqrt_eta_minus - tooth.sqrt_eta_minus).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn dispersion_barely_moves_recovery() {
        let kappa = 1.0;
        for (ep, em) in [(0.2, 1.0), (0.5, 0.8), (1.0, 0.2)] {
            for n in [1u32, 2] {
                let mut tooth = ToothResponse::from_etas(n, ep, em);
                tooth.phi_plus = 0.006;
                tooth.phi_minus = -0.004;
                let est = extract_quadratures(&eq6_trace(&tooth, kappa, 64)).unwrap();
                let order = if ep >= em {
                    SidebandOrder::UpperBrighter
                } else {
                    SidebandOrder::LowerBrighter
                };
                let r = recover_estimate(&est, kappa, n, order).unwrap();
                assert!((r.sqrt_eta_plus - tooth.sqrt_eta_plus).abs() <= 1e-2);
                assert!((r.sqrt_eta_minus - tooth.sqrt_eta_minus).abs() <= 1e-2);
            }
        }
    }

    #[test]
    fn floor_removal_and_calibration() {
        let comb = CombConfig {
            squeeze_s: 0.9,
            eta_d: 0.8,
            ..CombConfig::default()
        };
        for n in 0..=3u32 {
            let empty = ToothResponse::lossless(n);
            let cal_trace =
                PhaseSweepTrace::sample(n, 36, |a| mean_power(&empty, &comb, LoPhase::new(a)?))
                    .unwrap();
            let cal = calibrate(&cal_trace, &comb).unwrap();
            let expected = comb_kappa(&comb, n).unwrap() * bin_weight(n).sqrt();
            assert!(((cal.kappa - expected) / expected).abs() < 1e-9, "n={n}");

            let gas = ToothResponse::from_etas(n, 0.9, if n == 0 { 0.9 } else { 0.6 });
            let trace =
                PhaseSweepTrace::sample(n, 36, |a| mean_power(&gas, &comb, LoPhase::new(a)?))
                    .unwrap();
            let r = invert_trace(&trace, &comb, cal.kappa, SidebandOrder::UpperBrighter).unwrap();
            assert!(
                (r.sqrt_eta_plus - gas.sqrt_eta_plus).abs() < 1e-8,
                "n={n}: {r:?}"
            );
            assert!(
                (r.sqrt_eta_minus - gas.sqrt_eta_minus).abs() < 1e-8,
                "n={n}: {r:?}"
            );
        }
    }

    #[test]
    fn noisy_calibration_is_unbiased() {
        let comb = CombConfig {
            squeeze_s: 1.0,
            ..CombConfig::default()
        };
        let grid = sweep_grid(32).unwrap();
        let mut worst: f64 = 0.0;
        for n in 0..=5u32 {
            let expected = comb_kappa(&comb, n).unwrap().abs() * bin_weight(n).sqrt();
            for seed in 0..4u64 {
                let trace = crate::montecarlo::noisy_trace(
                    &ToothResponse::lossless(n),
                    &comb,
                    &grid,
                    100 * seed + u64::from(n),
                    10_000,
                )
                .unwrap();
                let cal = calibrate(&trace, &comb).unwrap();
                worst = worst.max((cal.kappa - expected).abs() / cal.se);
            }
        }
        assert!(worst < 4.0, "worst deviation {worst} se");
    }

    #[test]
    fn floor_dominated_teeth_invert() {
        // J_9(2)αβ ≈ 24 while the floor moves by ~10⁶ per unit of η₊ + η₋
        let comb = CombConfig {
            eta_d: 0.95,
            squeeze_s: 0.5,
            ..CombConfig::default()
        };
        for n in [6u32, 9] {
            let kappa = comb_kappa(&comb, n).unwrap().abs();
            if n > 6 {
                assert!(kappa * kappa < 1e-3 * noise_floor(&comb, n, 0.0).unwrap());
            }
            let gas = ToothResponse::from_etas(n, 0.9991, 0.9986);
            let trace =
                PhaseSweepTrace::sample(n, 32, |a| mean_power(&gas, &comb, LoPhase::new(a)?))
                    .unwrap();
            let r = invert_trace(&trace, &comb, kappa, SidebandOrder::UpperBrighter).unwrap();
            assert!(
                (r.sqrt_eta_plus - gas.sqrt_eta_plus).abs() < 1e-6,
                "n={n}: {r:?}"
            );
            assert!(
                (r.sqrt_eta_minus - gas.sqrt_eta_minus).abs() < 1e-6,
                "n={n}: {r:?}"
            );
        }
        let n = 16;
        let trace = PhaseSweepTrace::sample(n, 32, |a| {
            mean_power(&ToothResponse::lossless(n), &comb, LoPhase::new(a)?)
        })
        .unwrap();
        let kappa = comb_kappa(&comb, n).unwrap().abs();
        assert!(matches!(
            invert_trace(&trace, &comb, kappa, SidebandOrder::UpperBrighter),
            Err(Error::InconsistentTrace(_))
        ));
    }

    #[test]
    fn negative_quadrature_is_rejected() {
        // cos²-shaped dip below the floor
        let trace = PhaseSweepTrace::sample(2, 32, |a| Ok(1.0 - a.cos().powi(2))).unwrap();
        assert!(matches!(
            fit_trace(&trace).unwrap().quadratures(0.5),
            Err(Error::InconsistentTrace(_))
        ));
    }

    #[test]
    fn trace_validation() {
        assert!(sweep_grid(8).is_err());
        let grid = sweep_grid(16).unwrap();
        assert!(PhaseSweepTrace::new(1, grid.clone(), vec![0.0; 15]).is_err());
        let mut reversed = grid.clone();
        reversed.swap(3, 4);
        assert!(PhaseSweepTrace::new(1, reversed, vec![0.0; 16]).is_err());
        let mut outside = grid.clone();
        outside[15] = TAU;
        assert!(PhaseSweepTrace::new(1, outside, vec![0.0; 16]).is_err());
        assert!(PhaseSweepTrace::new(1, grid.clone(), vec![f64::NAN; 16]).is_err());
        // every offset on one quadrature
        let degenerate: Vec<f64> = (0..16).map(|i| f64::from(i) * 1e-9).collect();
        let trace = PhaseSweepTrace::new(1, degenerate, vec![1.0; 16]).unwrap();
        assert!(fit_trace(&trace).is_err());
    }
}
