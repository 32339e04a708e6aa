//! Command-line front end for `sqcomb`.
//!
//! Settings are read from a TOML file (`--config`), then environment
//! variables prefixed `SQCOMB_`, then flags; later sources win.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::Context;
use config::{ConfigFile, Format};
use error::CliError;
use output::Metadata;

#[derive(Debug, Parser)]
#[command(
    name = "sqcomb",
    version,
    about = "Squeezed frequency-comb absorption spectroscopy simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Transmission and dispersion across the line, plus the tooth sample points.
    LineProfile,
    /// Tooth amplitudes J_n(M) on both sides of the carrier.
    Comb,
    /// Mean power, variance, SNR and quantum advantage per tooth and squeezing level.
    Spectrum,
    /// Calibrate, sweep the LO and recover the sideband transmissions.
    Invert,
    /// Monte Carlo moment-matching suite; exits with status 4 on failure.
    Validate,
    /// Measure the normalization of every tooth from an empty-cell sweep.
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::LineProfile => "line-profile",
            Command::Comb => "comb",
            Command::Spectrum => "spectrum",
            Command::Invert => "invert",
            Command::Validate => "validate",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true, env = "SQCOMB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory for output files; standard output if omitted.
    #[arg(long, global = true, env = "SQCOMB_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, env = "SQCOMB_FORMAT", value_enum)]
    pub format: Option<Format>,
    /// HITRAN .par line file.
    #[arg(long, global = true, env = "SQCOMB_LINE_FILE")]
    pub line_file: Option<PathBuf>,
    #[arg(long, global = true, env = "SQCOMB_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "SQCOMB_SHOTS")]
    pub shots: Option<u64>,
    /// Comma-separated squeezing levels in dB.
    #[arg(long, global = true, env = "SQCOMB_SQUEEZE_DB", value_delimiter = ',')]
    pub squeeze_db: Option<Vec<f64>>,
    #[arg(long, global = true, env = "SQCOMB_MOD_DEPTH")]
    pub mod_depth: Option<f64>,
    #[arg(long, global = true, env = "SQCOMB_MOD_FREQ_HZ")]
    pub mod_freq_hz: Option<f64>,
    /// Total tooth count (odd).
    #[arg(long, global = true, env = "SQCOMB_TEETH")]
    pub teeth: Option<u32>,
    /// Use expectation values instead of sampled sweeps.
    #[arg(long, global = true)]
    pub noiseless: bool,
    /// Impose a dispersion difference (rad) on every sideband pair.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub force_delta_phi: Option<f64>,
    #[arg(long, global = true, hide = true)]
    pub corrupt_variance: bool,
}

impl Overrides {
    /// Loads the file, applies overrides and validates the result.
    pub fn resolve(&self) -> Result<Context, CliError> {
        let mut config = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let run = &mut config.run;
        if let Some(v) = &self.output {
            run.output = Some(v.clone());
        }
        if let Some(v) = self.format {
            run.format = v;
        }
        if let Some(v) = &self.line_file {
            run.line_file = Some(v.clone());
        }
        if let Some(v) = self.seed {
            run.seed = v;
        }
        if let Some(v) = self.shots {
            run.shots = v;
        }
        if let Some(v) = &self.squeeze_db {
            run.squeeze_db = v.clone();
        }
        let comb = &mut config.comb;
        if let Some(v) = self.mod_depth {
            comb.depth = v;
        }
        if let Some(v) = self.mod_freq_hz {
            comb.omega_mod_hz = v;
        }
        if let Some(v) = self.teeth {
            comb.n_teeth = v;
        }
        config.validate()?;
        if let Some(d) = self.force_delta_phi {
            if !d.is_finite() {
                return Err(CliError::Config(
                    "forced dispersion difference must be finite".into(),
                ));
            }
        }
        Ok(Context {
            config,
            noiseless: self.noiseless,
            force_delta_phi: self.force_delta_phi,
            corrupt_variance: self.corrupt_variance,
        })
    }
}

/// Runs one command, writing tables to the output directory or `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cx = cli.overrides.resolve()?;
    let outcome = match cli.command {
        Command::LineProfile => commands::line_profile(&cx)?,
        Command::Comb => commands::comb(&cx)?,
        Command::Spectrum => commands::spectrum(&cx)?,
        Command::Invert => commands::invert(&cx)?,
        Command::Validate => commands::validate(&cx)?,
        Command::Calibrate => commands::calibrate_cmd(&cx)?,
    };
    let meta = Metadata {
        command: cli.command.name().to_string(),
        config_sha256: cx.config.digest(),
        seed: cx.config.run.seed,
        rng: outcome.rng.clone(),
    };
    output::emit(
        &outcome.tables,
        &meta,
        cx.config.run.format,
        cx.config.run.output.as_deref(),
        out,
    )?;
    match outcome.failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(()),
    }
}
