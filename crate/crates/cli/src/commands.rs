//! The subcommands, each producing one or more tables.

use sqcomb::comb::{parity, squeeze_db_to_s, tooth_amplitudes, CombConfig};
use sqcomb::hitran::{LineList, SpectralLine};
use sqcomb::inversion::{calibrate, invert_trace, sweep_grid, PhaseSweepTrace, SidebandOrder};
use sqcomb::lineshape::{sample_absorber, Absorber, LineShape};
use sqcomb::montecarlo::{expected_trace, noisy_trace, MomentSuite, RNG_ALGORITHM};
use sqcomb::response::{bin_weight, kappa, snr_table, variance, ToothResponse};

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Resolved settings of one run.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub config: ConfigFile,
    /// Replace sampled sweeps by their expectation values.
    pub noiseless: bool,
    /// Impose this dispersion difference on every sideband pair.
    pub force_delta_phi: Option<f64>,
    /// Scale the expected variance of the moment suite by 1.5 (negative control).
    pub corrupt_variance: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub rng: String,
    /// Set when a validation check failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn deterministic(tables: Vec<Table>) -> Self {
        Self {
            tables,
            rng: "none".into(),
            failure: None,
        }
    }
}

struct Gas {
    lines: LineList,
    strongest: SpectralLine,
    centre: f64,
}

fn load_gas(cx: &Context) -> Result<Option<Gas>, CliError> {
    let run = &cx.config.run;
    let Some(path) = &run.line_file else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let all = LineList::from_par_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let lines = all.select_window(run.nu_min, run.nu_max, run.molecule_id)?;
    let strongest = *lines
        .lines()
        .iter()
        .max_by(|a, b| a.intensity.total_cmp(&b.intensity))
        .ok_or_else(|| {
            CliError::Data(format!(
                "no line found for molecule {} in [{}, {}] cm-1",
                run.molecule_id, run.nu_min, run.nu_max
            ))
        })?;
    let centre = LineShape::new(&strongest, &cx.config.gas)?.center;
    Ok(Some(Gas {
        lines,
        strongest,
        centre,
    }))
}

fn require_gas(cx: &Context) -> Result<Gas, CliError> {
    load_gas(cx)?.ok_or_else(|| {
        CliError::Config("no line file given (RunConfig.line_file or --line-file)".into())
    })
}

fn comb_for(cx: &Context, gas: Option<&Gas>) -> CombConfig {
    let mut comb = cx.config.comb;
    if let (true, Some(gas)) = (cx.config.run.carrier_at_line, gas) {
        comb.carrier_nu = gas.centre;
    }
    comb
}

/// Gas response at every tooth pair; an empty cell without a line file.
fn teeth_for(
    cx: &Context,
    gas: Option<&Gas>,
    comb: &CombConfig,
) -> Result<Vec<ToothResponse>, CliError> {
    let mut teeth = match gas {
        Some(gas) => sample_absorber(&Absorber::new(gas.lines.lines(), &cx.config.gas)?, comb)?,
        None => (0..=comb.max_index())
            .map(ToothResponse::lossless)
            .collect(),
    };
    if let Some(dphi) = cx.force_delta_phi {
        for t in teeth.iter_mut().filter(|t| t.n > 0) {
            t.phi_plus = 0.5 * dphi;
            t.phi_minus = -0.5 * dphi;
        }
    }
    Ok(teeth)
}

fn sideband_order(comb: &CombConfig, gas: Option<&Gas>) -> SidebandOrder {
    gas.map_or(SidebandOrder::default(), |g| {
        SidebandOrder::for_carrier(comb.carrier_nu, g.centre)
    })
}

/// Independent seed for each (purpose, tooth) pair.
fn derive_seed(seed: u64, purpose: u64, n: u32) -> u64 {
    let mut z = seed
        .wrapping_add(purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(u64::from(n).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sweep(
    cx: &Context,
    tooth: &ToothResponse,
    comb: &CombConfig,
    seed: u64,
) -> Result<PhaseSweepTrace, CliError> {
    let grid = sweep_grid(cx.config.run.sweep_points)?;
    Ok(if cx.noiseless {
        expected_trace(tooth, comb, &grid)?
    } else {
        noisy_trace(tooth, comb, &grid, seed, cx.config.run.shots)?
    })
}

fn sweep_rng(cx: &Context) -> String {
    if cx.noiseless {
        "none (noiseless)".into()
    } else {
        RNG_ALGORITHM.into()
    }
}

pub fn line_profile(cx: &Context) -> Result<Outcome, CliError> {
    let gas = require_gas(cx)?;
    let comb = comb_for(cx, Some(&gas));
    comb.validate()?;
    let absorber = Absorber::new(gas.lines.lines(), &cx.config.gas)?;
    let run = &cx.config.run;

    let mut profile = Table::new("line_profile", vec!["nu", "offset", "eta", "phi"]);
    let steps = run.profile_points - 1;
    for i in 0..=steps {
        let offset = run.profile_half_width * (2.0 * i as f64 / steps as f64 - 1.0);
        let nu = gas.centre + offset;
        let t = absorber.transmission(nu)?;
        profile.push(vec![nu.into(), offset.into(), t.eta().into(), t.phi.into()]);
    }

    let mut teeth = Table::new(
        "teeth",
        vec!["n", "side", "nu", "eta", "phi", "tooth_spacing"],
    );
    for n in 0..=comb.max_index() {
        let (upper, lower) = comb.tooth_wavenumbers(n);
        let sides: &[(&str, f64)] = if n == 0 {
            &[("0", upper)]
        } else {
            &[("+", upper), ("-", lower)]
        };
        for &(side, nu) in sides {
            let t = absorber.transmission(nu)?;
            teeth.push(vec![
                n.into(),
                side.into(),
                nu.into(),
                t.eta().into(),
                t.phi.into(),
                comb.tooth_spacing().into(),
            ]);
        }
    }
    log_line(&gas);
    Ok(Outcome::deterministic(vec![profile, teeth]))
}

fn log_line(gas: &Gas) {
    log::info!(
        "line {}/{} at {} cm-1 (shifted centre {:.6})",
        gas.strongest.molecule_id,
        gas.strongest.isotopologue_id,
        gas.strongest.nu0,
        gas.centre
    );
}

pub fn comb(cx: &Context) -> Result<Outcome, CliError> {
    let comb = cx.config.comb;
    let mut table = Table::new("comb", vec!["n", "amplitude", "nu"]);
    let amplitudes = tooth_amplitudes(&comb)?;
    let mut rows: Vec<(i64, f64, f64)> = Vec::new();
    for t in &amplitudes {
        let (upper, lower) = comb.tooth_wavenumbers(t.n);
        rows.push((i64::from(t.n), t.upper(), upper));
        if t.n > 0 {
            rows.push((-i64::from(t.n), t.lower(), lower));
        }
    }
    rows.sort_by_key(|r| r.0);
    // teeth that carry no field at all are left out
    for (n, amplitude, nu) in rows.into_iter().filter(|r| r.1 != 0.0) {
        table.push(vec![n.into(), amplitude.into(), nu.into()]);
    }
    debug_assert!(amplitudes.iter().all(|t| t.parity_factor == parity(t.n)));
    Ok(Outcome::deterministic(vec![table]))
}

pub fn spectrum(cx: &Context) -> Result<Outcome, CliError> {
    let gas = load_gas(cx)?;
    let base = comb_for(cx, gas.as_ref());
    let teeth = teeth_for(cx, gas.as_ref(), &base)?;
    let mut table = Table::new(
        "spectrum",
        vec![
            "squeeze_db",
            "squeeze_s",
            "n",
            "quadrature",
            "eta_plus",
            "eta_minus",
            "delta_phi",
            "kappa",
            "classical_power",
            "mean_power",
            "variance",
            "snr",
            "snr_normalized",
            "advantage",
            "out_of_regime",
        ],
    );
    for &db in &cx.config.run.squeeze_db {
        let comb = CombConfig {
            squeeze_s: squeeze_db_to_s(db)?,
            ..base
        };
        for (row, tooth) in snr_table(&teeth, &comb)?.iter().zip(&teeth) {
            table.push(vec![
                db.into(),
                row.squeeze_s.into(),
                row.n.into(),
                format!("{:?}", row.quadrature).into(),
                tooth.eta_plus().into(),
                tooth.eta_minus().into(),
                row.delta_phi.into(),
                row.kappa.into(),
                row.classical_power.into(),
                row.mean_power.into(),
                row.variance.into(),
                row.snr.into(),
                row.snr_normalized.into(),
                row.advantage.into(),
                row.out_of_regime.into(),
            ]);
        }
    }
    Ok(Outcome::deterministic(vec![table]))
}

pub fn calibrate_cmd(cx: &Context) -> Result<Outcome, CliError> {
    let comb = cx.config.comb;
    comb.validate()?;
    let mut table = Table::new(
        "calibrate",
        vec![
            "n",
            "kappa_expected",
            "kappa_measured",
            "se",
            "relative_error",
            "status",
        ],
    );
    for n in 0..=comb.max_index() {
        let expected = kappa(&comb, n)?.abs() * bin_weight(n).sqrt();
        let trace = sweep(
            cx,
            &ToothResponse::lossless(n),
            &comb,
            derive_seed(cx.config.run.seed, 1, n),
        )?;
        match calibrate(&trace, &comb) {
            Ok(cal) => table.push(vec![
                n.into(),
                expected.into(),
                cal.kappa.into(),
                cal.se.into(),
                ((cal.kappa - expected) / expected).into(),
                "ok".into(),
            ]),
            Err(e) => table.push(vec![
                n.into(),
                expected.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                e.to_string().into(),
            ]),
        }
    }
    Ok(Outcome {
        tables: vec![table],
        rng: sweep_rng(cx),
        failure: None,
    })
}

pub fn invert(cx: &Context) -> Result<Outcome, CliError> {
    let gas = load_gas(cx)?;
    let comb = comb_for(cx, gas.as_ref());
    let teeth = teeth_for(cx, gas.as_ref(), &comb)?;
    let order = sideband_order(&comb, gas.as_ref());
    let seed = cx.config.run.seed;
    let mut table = Table::new(
        "invert",
        vec![
            "n",
            "kappa_measured",
            "delta_phi",
            "sqrt_eta_plus_true",
            "sqrt_eta_plus",
            "se_plus",
            "error_plus",
            "sqrt_eta_minus_true",
            "sqrt_eta_minus",
            "se_minus",
            "error_minus",
            "clamped_plus",
            "clamped_minus",
            "status",
        ],
    );
    for tooth in &teeth {
        let n = tooth.n;
        let empty = sweep(
            cx,
            &ToothResponse::lossless(n),
            &comb,
            derive_seed(seed, 1, n),
        )?;
        let measured = sweep(cx, tooth, &comb, derive_seed(seed, 2, n))?;
        let result = calibrate(&empty, &comb)
            .and_then(|cal| Ok((cal, invert_trace(&measured, &comb, cal.kappa, order)?)));
        match result {
            Ok((cal, r)) => {
                // √η scales as 1/κ, so the calibration error enters both sidebands
                let kappa_rel = cal.se / cal.kappa;
                let se_plus = r.se_plus.hypot(r.sqrt_eta_plus * kappa_rel);
                let se_minus = r.se_minus.hypot(r.sqrt_eta_minus * kappa_rel);
                table.push(vec![
                    n.into(),
                    cal.kappa.into(),
                    tooth.delta_phi().into(),
                    tooth.sqrt_eta_plus.into(),
                    r.sqrt_eta_plus.into(),
                    se_plus.into(),
                    (r.sqrt_eta_plus - tooth.sqrt_eta_plus).into(),
                    tooth.sqrt_eta_minus.into(),
                    r.sqrt_eta_minus.into(),
                    se_minus.into(),
                    (r.sqrt_eta_minus - tooth.sqrt_eta_minus).into(),
                    r.clamped_plus.into(),
                    r.clamped_minus.into(),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                let mut row: Vec<Cell> = vec![n.into(), f64::NAN.into(), tooth.delta_phi().into()];
                row.extend([
                    Cell::Num(tooth.sqrt_eta_plus),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Num(tooth.sqrt_eta_minus),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Bool(false),
                    Cell::Bool(false),
                    Cell::Text(e.to_string()),
                ]);
                table.push(row);
            }
        }
    }
    Ok(Outcome {
        tables: vec![table],
        rng: sweep_rng(cx),
        failure: None,
    })
}

pub fn validate(cx: &Context) -> Result<Outcome, CliError> {
    let run = &cx.config.run;
    let suite = MomentSuite {
        seed: run.seed,
        points: run.validate_points,
        shots: usize::try_from(run.shots)
            .map_err(|_| CliError::Config("shot count too large".into()))?,
        threshold: 3.0,
        base: cx.config.comb,
    };
    let scale = if cx.corrupt_variance { 1.5 } else { 1.0 };
    let points = suite.run(|tooth, comb| Ok(scale * variance(tooth, comb)?))?;
    let mut table = Table::new(
        "validate",
        vec![
            "point",
            "n",
            "depth",
            "squeeze_s",
            "eta_d",
            "eta_plus",
            "eta_minus",
            "lo_phase",
            "expected_mean",
            "observed_mean",
            "mean_z",
            "expected_variance",
            "observed_variance",
            "variance_z",
            "passed",
        ],
    );
    for p in &points {
        let c = &p.check;
        table.push(vec![
            p.index.into(),
            p.tooth.n.into(),
            p.depth.into(),
            p.squeeze_s.into(),
            p.eta_d.into(),
            p.tooth.eta_plus().into(),
            p.tooth.eta_minus().into(),
            p.lo_phase.into(),
            c.expected_mean.into(),
            c.observed_mean.into(),
            c.mean_z().into(),
            c.expected_variance.into(),
            c.observed_variance.into(),
            c.variance_z().into(),
            p.passed.into(),
        ]);
    }
    let failed = points.iter().filter(|p| !p.passed).count();
    eprintln!(
        "moment suite: {}/{} points within 3 standard errors",
        points.len() - failed,
        points.len()
    );
    Ok(Outcome {
        tables: vec![table],
        rng: RNG_ALGORITHM.into(),
        failure: (failed > 0).then(|| {
            format!(
                "{failed} of {} points outside 3 standard errors",
                points.len()
            )
        }),
    })
}
