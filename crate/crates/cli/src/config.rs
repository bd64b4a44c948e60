//! Study configuration files.
//!
//! A configuration is a flat list of `key = value` lines (TOML syntax):
//!
//! ```text
//! study = "gaussian_streams"      # or "irt_responses"
//! mode = "known_model"            # or "bounded_model"
//! pool_size = 500
//! horizon = 50
//! alpha = 0.01
//! rho_range = [0.0, 0.1]
//! mu_range = [1.0, 2.0]
//! selected_items = 50
//! replications = 200
//! seed = 0
//! ```
//!
//! Every key of [`StudyConfig`] is accepted; anything else is rejected with
//! the offending key in the message.

use std::path::Path;

use itemwatch::sim::StudyConfig;

use crate::error::{CliError, Result};

pub fn parse_study_config(text: &str, path: &Path) -> Result<StudyConfig> {
    let config: StudyConfig = toml::from_str(text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    config.validate().map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(config)
}

pub fn load_study_config(path: &Path) -> Result<StudyConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_study_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<StudyConfig> {
        parse_study_config(text, Path::new("test.cfg"))
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse("study = \"gaussian_streams\"\nmode = \"known_model\"\n").unwrap();
        assert_eq!(c, StudyConfig::study1());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse("study = \"gaussian_streams\"\nmode = \"known_model\"\nalpah = 0.05\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("alpah"), "{err}");
    }

    #[test]
    fn invalid_value_is_named() {
        let err = parse("study = \"gaussian_streams\"\nmode = \"known_model\"\nalpha = 2.0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("`alpha`"), "{err}");
        let err = parse("study = \"gaussian_streams\"\nmode = \"known_model\"\npool_size = -3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("pool_size"), "{err}");
    }
}
