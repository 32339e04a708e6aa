//! Seeded stochastic model of the measured spectral power.
//!
//! Each shot is the classical power plus three independent noise groups
//! (squeezed quadrature, vacuum admitted by sample loss, vacuum admitted by
//! detector loss), each a squared standard normal scaled by its mean power:
//!
//! ```text
//! S = |I|² + σ²_sq z₁² + σ²_vac z₂² + σ²_det z₃²
//! ```
//!
//! so `E[S] = |I|² + Σσ²` and `Var[S] = 2Σσ⁴`. Only these two moments are
//! meaningful; higher moments are a property of the model.
//!
//! Draws are split into fixed-size blocks, each from its own ChaCha20 stream
//! keyed by the seed and the block index, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::CombConfig;
use crate::error::{domain, Error, Result};
use crate::inversion::{check_grid, PhaseSweepTrace};
use crate::response::{self, bin_weight, classical_power, kappa, LoPhase, ToothResponse};

/// Generator recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9), one stream per 4096-sample block";

const BLOCK: usize = 4096;

/// Mean power of each noise group in one analyzer bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// `|β|²J²η_d(η₊+η₋)e^{−2s}`
    pub sigma2_sq: f64,
    /// `|β|²η_d(2−η₊−η₋)`
    pub sigma2_vac: f64,
    /// `1−η_d`
    pub sigma2_det: f64,
}

impl NoiseBudget {
    pub fn for_tooth(tooth: &ToothResponse, comb: &CombConfig) -> Result<Self> {
        comb.validate()?;
        let n = tooth.n;
        let w = bin_weight(n);
        let j = comb.amplitude(n)?;
        let beta2 = comb.beta_mag * comb.beta_mag;
        let (eta_p, eta_m) = (tooth.eta_plus(), tooth.eta_minus());
        Ok(Self {
            sigma2_sq: w
                * beta2
                * j
                * j
                * comb.eta_d
                * (eta_p + eta_m)
                * (-2.0 * comb.squeeze_s).exp(),
            sigma2_vac: w * beta2 * comb.eta_d * (1.0 - eta_p + 1.0 - eta_m),
            sigma2_det: w * (1.0 - comb.eta_d),
        })
    }

    pub fn mean(&self) -> f64 {
        self.sigma2_sq + self.sigma2_vac + self.sigma2_det
    }

    pub fn variance(&self) -> f64 {
        2.0 * (self.sigma2_sq.powi(2) + self.sigma2_vac.powi(2) + self.sigma2_det.powi(2))
    }

    fn groups(&self) -> [f64; 3] {
        [self.sigma2_sq, self.sigma2_vac, self.sigma2_det]
    }
}

/// Shots drawn for one tooth pair and LO offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub count: usize,
    pub rng: String,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn bin_classical_power(tooth: &ToothResponse, comb: &CombConfig, lo: LoPhase) -> Result<f64> {
    Ok(bin_weight(tooth.n) * classical_power(tooth, kappa(comb, tooth.n)?, lo, tooth.delta_phi())?)
}

/// Draws `count` spectral-power shots.
pub fn draw_powers(
    tooth: &ToothResponse,
    comb: &CombConfig,
    lo: LoPhase,
    seed: u64,
    count: usize,
) -> Result<SampleBatch> {
    if count == 0 {
        return domain("at least one shot is needed");
    }
    let classical = bin_classical_power(tooth, comb, lo)?;
    let groups = NoiseBudget::for_tooth(tooth, comb)?.groups();
    let mut values = vec![0.0; count];
    values
        .par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let mut rng = stream(seed, block as u64);
            for v in out {
                *v = classical
                    + groups
                        .iter()
                        .map(|g| {
                            let z: f64 = rng.sample(StandardNormal);
                            g * z * z
                        })
                        .sum::<f64>();
            }
        });
    Ok(SampleBatch {
        seed,
        count,
        rng: RNG_ALGORITHM.to_string(),
        values,
    })
}

/// Sweep whose samples are the mean of `shots_per_phase` shots at each offset.
///
/// The mean of `N` squared normals is drawn directly as `χ²_N / N`.
pub fn noisy_trace(
    tooth: &ToothResponse,
    comb: &CombConfig,
    phase_grid: &[f64],
    seed: u64,
    shots_per_phase: u64,
) -> Result<PhaseSweepTrace> {
    if shots_per_phase == 0 {
        return domain("at least one shot per LO offset is needed");
    }
    check_grid(phase_grid)?;
    let groups = NoiseBudget::for_tooth(tooth, comb)?.groups();
    let shots = shots_per_phase as f64;
    let chi2 = ChiSquared::new(shots).map_err(|e| Error::Domain(e.to_string()))?;
    let powers = phase_grid
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let classical = bin_classical_power(tooth, comb, LoPhase::new(a)?)?;
            let mut rng = stream(seed, i as u64);
            let noise: f64 = groups
                .iter()
                .map(|g| g * chi2.sample(&mut rng) / shots)
                .sum();
            Ok(classical + noise)
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseSweepTrace::new(tooth.n, phase_grid.to_vec(), powers)
}

/// Sweep of the expected spectral power, without sampling noise.
pub fn expected_trace(
    tooth: &ToothResponse,
    comb: &CombConfig,
    phase_grid: &[f64],
) -> Result<PhaseSweepTrace> {
    let powers = phase_grid
        .iter()
        .map(|&a| response::mean_power(tooth, comb, LoPhase::new(a)?))
        .collect::<Result<Vec<_>>>()?;
    PhaseSweepTrace::new(tooth.n, phase_grid.to_vec(), powers)
}

/// Empirical moments of a batch against their expected values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub expected_mean: f64,
    pub observed_mean: f64,
    pub mean_se: f64,
    pub expected_variance: f64,
    pub observed_variance: f64,
    /// From the fourth central moment, `√((m₄ − s⁴)/N)`.
    pub variance_se: f64,
}

impl MomentCheck {
    pub fn from_batch(batch: &SampleBatch, expected_mean: f64, expected_variance: f64) -> Self {
        let n = batch.values.len() as f64;
        let mean = batch.mean();
        let (m2, m4) = batch.values.iter().fold((0.0, 0.0), |(m2, m4), v| {
            let d = v - mean;
            let d2 = d * d;
            (m2 + d2, m4 + d2 * d2)
        });
        let variance = m2 / (n - 1.0).max(1.0);
        let m4 = m4 / n;
        Self {
            expected_mean,
            observed_mean: mean,
            mean_se: (variance / n).sqrt(),
            expected_variance,
            observed_variance: variance,
            variance_se: ((m4 - variance * variance).max(0.0) / n).sqrt(),
        }
    }

    pub fn mean_z(&self) -> f64 {
        z_score(self.observed_mean, self.expected_mean, self.mean_se)
    }

    pub fn variance_z(&self) -> f64 {
        z_score(
            self.observed_variance,
            self.expected_variance,
            self.variance_se,
        )
    }

    /// Both moments within `k` standard errors.
    pub fn passes(&self, k: f64) -> bool {
        self.mean_z().abs() <= k && self.variance_z().abs() <= k
    }
}

fn z_score(observed: f64, expected: f64, se: f64) -> f64 {
    let diff = observed - expected;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 * expected.abs().max(1e-300) {
        0.0
    } else {
        f64::INFINITY * diff.signum()
    }
}

/// Settings of the moment-matching suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSuite {
    pub seed: u64,
    pub points: usize,
    pub shots: usize,
    /// Allowed deviation in standard errors.
    pub threshold: f64,
    /// Probe, LO and comb settings shared by every point.
    pub base: CombConfig,
}

impl Default for MomentSuite {
    fn default() -> Self {
        Self {
            seed: 2024,
            points: 20,
            shots: 100_000,
            threshold: 3.0,
            base: CombConfig::default(),
        }
    }
}

/// One parameter point of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub index: usize,
    pub tooth: ToothResponse,
    pub depth: f64,
    pub squeeze_s: f64,
    pub eta_d: f64,
    pub lo_phase: f64,
    pub check: MomentCheck,
    pub passed: bool,
}

impl MomentSuite {
    /// Draws random operating points and checks the sampled moments against
    /// the analytic mean and `expected_variance`.
    pub fn run<F>(&self, expected_variance: F) -> Result<Vec<MomentPoint>>
    where
        F: Fn(&ToothResponse, &CombConfig) -> Result<f64>,
    {
        if self.points == 0 || self.shots < 2 {
            return domain("the suite needs at least one point and two shots");
        }
        let mut rng = stream(self.seed, u64::MAX);
        (0..self.points)
            .map(|index| {
                let depth = if rng.random_bool(0.5) { 2.0 } else { 10.0 };
                let comb = CombConfig {
                    depth,
                    squeeze_s: rng.random_range(0.0..=1.7),
                    eta_d: rng.random_range(0.5..=1.0),
                    ..self.base
                };
                let n = rng.random_range(0..=16u32.min(comb.max_index()));
                let eta_plus: f64 = rng.random_range(0.1..=1.0);
                let eta_minus: f64 = if n == 0 {
                    eta_plus
                } else {
                    rng.random_range(0.1..=1.0)
                };
                let phi_plus: f64 = rng.random_range(-0.02..=0.02);
                let phi_minus = if n == 0 {
                    phi_plus
                } else {
                    rng.random_range(-0.02..=0.02)
                };
                let tooth = ToothResponse {
                    n,
                    sqrt_eta_plus: eta_plus.sqrt(),
                    sqrt_eta_minus: eta_minus.sqrt(),
                    phi_plus,
                    phi_minus,
                };
                let lo_phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let lo = LoPhase::new(lo_phase)?;
                let batch = draw_powers(
                    &tooth,
                    &comb,
                    lo,
                    self.seed.wrapping_add(index as u64),
                    self.shots,
                )?;
                let check = MomentCheck::from_batch(
                    &batch,
                    response::mean_power(&tooth, &comb, lo)?,
                    expected_variance(&tooth, &comb)?,
                );
                Ok(MomentPoint {
                    index,
                    tooth,
                    depth,
                    squeeze_s: comb.squeeze_s,
                    eta_d: comb.eta_d,
                    lo_phase,
                    passed: check.passes(self.threshold),
                    check,
                })
            })
            .collect()
    }
}
