use std::fs;
use std::path::Path;

use fdmix::{build_system, RawConfig, SystemParams};

use crate::error::{CliError, Result};

/// Reads and validates a config file. Errors name the file and, for invalid
/// values, the dotted key path.
pub fn load_config(path: &Path) -> Result<(RawConfig, SystemParams)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let location = path.display().to_string();
    let raw = RawConfig::from_toml(&text).map_err(|source| CliError::Config {
        location: location.clone(),
        source,
    })?;
    let params = build_system(&raw).map_err(|source| CliError::Config { location, source })?;
    Ok((raw, params))
}
