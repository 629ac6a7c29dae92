//! Flat JSON run configuration. Field names follow [`TransponderParams`]
//! plus the chain settings; every field is optional and unknown fields are
//! rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytics::TransponderParams;
use crate::chainsim::{ChainConfig, SimMode, DEFAULT_MAX_CYCLES};
use crate::simcore::PureState;

use super::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_STAGES: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    pub d: Option<f64>,
    pub n: Option<u32>,
    pub eta: Option<f64>,
    pub p_one: Option<f64>,
    pub p_spg: Option<f64>,
    pub nu: Option<f64>,
    pub num_stages: Option<u32>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub mode: Option<SimMode>,
    pub p_t: Option<f64>,
    pub max_cycles: Option<u64>,
    /// Four `[re, im]` amplitudes of the logical input, normalized.
    pub logical: Option<Vec<[f64; 2]>>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Usage(format!(
                "{origin}:{}:{}: {}",
                e.line(),
                e.column(),
                strip_position(&e.to_string())
            ))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn params(&self) -> TransponderParams<f64> {
        let d = TransponderParams::default();
        TransponderParams {
            alpha: self.alpha.unwrap_or(d.alpha),
            d: self.d.unwrap_or(d.d),
            n: self.n.unwrap_or(d.n),
            eta: self.eta.unwrap_or(d.eta),
            p_one: self.p_one.unwrap_or(d.p_one),
            p_spg: self.p_spg.unwrap_or(d.p_spg),
            nu: self.nu.unwrap_or(d.nu),
        }
    }

    fn logical_state(&self) -> Result<Option<PureState<f64>>, CliError> {
        let Some(amps) = &self.logical else {
            return Ok(None);
        };
        let amps: Vec<Complex64> = amps
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        PureState::new(amps)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("config field `logical`: {e}")))
    }
}

/// serde_json appends " at line L column C"; the position is already
/// reported in front.
fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub stages: Option<u32>,
    pub mode: Option<SimMode>,
    pub p_t: Option<f64>,
    pub max_cycles: Option<u64>,
}

/// Flag, then config file, then built-in default.
pub fn chain_config(file: &ConfigFile, flags: Overrides) -> Result<ChainConfig, CliError> {
    let mut config = ChainConfig::new(
        file.params(),
        flags.stages.or(file.num_stages).unwrap_or(DEFAULT_STAGES),
        flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    );
    config.mode = flags.mode.or(file.mode).unwrap_or(SimMode::AggregatePt);
    config.p_t = flags.p_t.or(file.p_t);
    config.max_cycles = flags
        .max_cycles
        .or(file.max_cycles)
        .unwrap_or(DEFAULT_MAX_CYCLES);
    config.logical = file.logical_state()?;
    config.validate()?;
    Ok(config)
}
