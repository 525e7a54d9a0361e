//! Defaults shared by all subcommands, optionally read from a TOML file.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Tolerances and evaluator settings; every field can be overridden per flag.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Series evaluation tolerance.
    pub eval_tol: f64,
    /// Contour quadrature tolerance.
    pub quad_tol: f64,
    pub angular_tol: f64,
    pub abscissa: f64,
    pub nodes: usize,
    pub height: Option<f64>,
    pub n_max: usize,
    pub deltas: Vec<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            eval_tol: 1e-10,
            quad_tol: 1e-8,
            angular_tol: 1e-9,
            abscissa: 0.5,
            nodes: 64,
            height: None,
            n_max: fracstar::wright::DEFAULT_N_MAX,
            deltas: vec![1.2, 1.1, 1.05, 1.025],
        }
    }
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let s: Settings = toml::from_str("quad_tol = 1e-9\ndeltas = [1.3, 1.2]").unwrap();
        assert_eq!(s.quad_tol, 1e-9);
        assert_eq!(s.eval_tol, 1e-10);
        assert_eq!(s.deltas, vec![1.3, 1.2]);
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
    }
}
