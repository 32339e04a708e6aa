//! Run configuration: a TOML file with `[RunConfig]`, `[GasConditions]` and
//! `[CombConfig]` sections, overridden by environment variables and flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sqcomb::comb::CombConfig;
use sqcomb::inversion::MIN_TRACE_LEN;
use sqcomb::lineshape::GasConditions;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Input selection, sampling and output settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// HITRAN `.par` file, relative to the configuration file.
    pub line_file: Option<PathBuf>,
    pub molecule_id: u8,
    /// Line-selection window, cm⁻¹.
    pub nu_min: f64,
    pub nu_max: f64,
    /// Place the carrier on the pressure-shifted centre of the strongest line.
    pub carrier_at_line: bool,
    /// Half width of the line-profile grid around the line centre, cm⁻¹.
    pub profile_half_width: f64,
    pub profile_points: usize,
    /// Squeezing levels for the spectrum table, dB.
    pub squeeze_db: Vec<f64>,
    /// LO offsets per phase sweep.
    pub sweep_points: usize,
    pub seed: u64,
    /// Shots per LO offset, or per point of the moment suite.
    pub shots: u64,
    /// Random operating points of the moment suite.
    pub validate_points: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            line_file: None,
            molecule_id: 26,
            nu_min: 6533.0,
            nu_max: 6536.0,
            carrier_at_line: false,
            profile_half_width: 0.3,
            profile_points: 601,
            squeeze_db: vec![0.0, 5.0, 10.0, 15.0],
            sweep_points: 32,
            seed: 1,
            shots: 100_000,
            validate_points: 20,
            output: None,
            format: Format::Csv,
        }
    }
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "RunConfig")]
    pub run: RunConfig,
    #[serde(rename = "GasConditions")]
    pub gas: GasConditions,
    #[serde(rename = "CombConfig")]
    pub comb: CombConfig,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut file = Self::parse(&text)?;
        // relative line files are taken from the config file's directory
        if let (Some(line_file), Some(dir)) = (&file.run.line_file, path.parent()) {
            if line_file.is_relative() {
                file.run.line_file = Some(dir.join(line_file));
            }
        }
        Ok(file)
    }

    /// Checks every value before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.comb.validate()?;
        self.gas.validate()?;
        let run = &self.run;
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(run.nu_min.is_finite() && run.nu_max.is_finite() && run.nu_min < run.nu_max) {
            return bad(format!(
                "empty line window [{}, {}]",
                run.nu_min, run.nu_max
            ));
        }
        if !(run.profile_half_width.is_finite() && run.profile_half_width > 0.0) {
            return bad(format!(
                "profile half width must be positive, got {}",
                run.profile_half_width
            ));
        }
        if run.profile_points < 2 {
            return bad(format!(
                "profile needs at least 2 points, got {}",
                run.profile_points
            ));
        }
        if run.squeeze_db.is_empty()
            || run
                .squeeze_db
                .iter()
                .any(|db| !(db.is_finite() && *db >= 0.0))
        {
            return bad(
                "squeezing levels must be a non-empty list of non-negative dB values".into(),
            );
        }
        if run.sweep_points < MIN_TRACE_LEN {
            return bad(format!(
                "a phase sweep needs at least {MIN_TRACE_LEN} points, got {}",
                run.sweep_points
            ));
        }
        if run.shots < 2 {
            return bad(format!("at least 2 shots are needed, got {}", run.shots));
        }
        if run.validate_points == 0 {
            return bad("the moment suite needs at least one point".into());
        }
        if let Some(path) = &run.line_file {
            if !path.is_file() {
                return bad(format!("line file {} does not exist", path.display()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration.
    pub fn digest(&self) -> String {
        let text = toml::to_string(self).unwrap_or_default();
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
