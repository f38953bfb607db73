//! Solver settings from defaults, a `key = value` file, `OSC_<KEY>`
//! environment variables and command-line overrides, applied in that order.

use std::fs;
use std::path::Path;

use oscquad_core::{Levin2dConfig, OracleConfig};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SettingsError {
    #[error("{origin}: unknown setting '{key}' (known: {})", KEYS.join(", "))]
    UnknownKey { origin: String, key: String },
    #[error("{origin}: invalid value '{value}' for '{key}'")]
    BadValue {
        origin: String,
        key: String,
        value: String,
    },
    #[error("{origin}: expected 'key = value', found '{line}'")]
    Syntax { origin: String, line: String },
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
    #[error("inconsistent settings: {0}")]
    Invalid(String),
}

pub const KEYS: [&str; 14] = [
    "k",
    "l",
    "eps_svd",
    "residual_tol",
    "max_depth",
    "extra_levels",
    "n_points",
    "eps_svd1d",
    "tol1d",
    "max_depth1d",
    "oracle_gl_points",
    "oracle_tol",
    "oracle_max_depth",
    "oracle_max_omega",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub levin: Levin2dConfig,
    pub oracle: OracleConfig,
    /// Largest ω for which the area oracle is attempted in sweeps.
    pub oracle_max_omega: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            levin: Levin2dConfig::default(),
            oracle: OracleConfig::default(),
            oracle_max_omega: 1e3,
        }
    }
}

impl Settings {
    /// Applies one setting. `eps_svd` sets both solvers; `eps_svd1d` only the univariate one.
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), SettingsError> {
        let bad = || SettingsError::BadValue {
            origin: origin.into(),
            key: key.into(),
            value: value.into(),
        };
        let real = || value.trim().parse::<f64>().map_err(|_| bad());
        let count = || value.trim().parse::<usize>().map_err(|_| bad());
        match key {
            "k" => self.levin.k = count()?,
            "l" => self.levin.l = count()?,
            "eps_svd" => {
                self.levin.eps_svd = real()?;
                self.levin.cfg1d.eps_svd = self.levin.eps_svd;
            }
            "residual_tol" => self.levin.residual_tol = real()?,
            "max_depth" => self.levin.max_depth = count()?,
            "extra_levels" => self.levin.extra_levels = count()?,
            "n_points" => self.levin.cfg1d.n_points = count()?,
            "eps_svd1d" => self.levin.cfg1d.eps_svd = real()?,
            "tol1d" => self.levin.cfg1d.tol = real()?,
            "max_depth1d" => self.levin.cfg1d.max_depth = count()?,
            "oracle_gl_points" => self.oracle.gl_points = count()?,
            "oracle_tol" => self.oracle.tol = real()?,
            "oracle_max_depth" => self.oracle.max_depth = count()?,
            "oracle_max_omega" => self.oracle_max_omega = real()?,
            _ => {
                return Err(SettingsError::UnknownKey {
                    origin: origin.into(),
                    key: key.into(),
                })
            }
        }
        Ok(())
    }

    /// Applies a `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, name: &str) -> Result<(), SettingsError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = format!("{name}:{}", i + 1);
            let (k, v) = line.split_once('=').ok_or_else(|| SettingsError::Syntax {
                origin: origin.clone(),
                line: line.into(),
            })?;
            self.set(k.trim(), v.trim(), &origin)?;
        }
        Ok(())
    }

    /// Applies `OSC_<KEY>` variables from the given environment.
    pub fn apply_env(&mut self, env: impl Fn(&str) -> Option<String>) -> Result<(), SettingsError> {
        for key in KEYS {
            let var = format!("OSC_{}", key.to_ascii_uppercase());
            if let Some(v) = env(&var) {
                self.set(key, &v, &var)?;
            }
        }
        Ok(())
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides(&mut self, items: &[String]) -> Result<(), SettingsError> {
        for item in items {
            let (k, v) = item.split_once('=').ok_or_else(|| SettingsError::Syntax {
                origin: "--set".into(),
                line: item.clone(),
            })?;
            self.set(k.trim(), v.trim(), "--set")?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        self.levin
            .validate()
            .map_err(|e| SettingsError::Invalid(e.to_string()))?;
        self.oracle
            .validate()
            .map_err(|e| SettingsError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// Defaults, then `config`, then the process environment, then `overrides`.
    pub fn load(config: Option<&Path>, overrides: &[String]) -> Result<Settings, SettingsError> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = fs::read_to_string(path).map_err(|e| SettingsError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            s.apply_text(&text, &path.display().to_string())?;
        }
        s.apply_env(|k| std::env::var(k).ok())?;
        s.apply_overrides(overrides)?;
        s.validate()?;
        Ok(s)
    }
}
