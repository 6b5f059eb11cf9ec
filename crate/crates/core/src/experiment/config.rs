use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bath::BathParams;
use crate::davies::{GeneratorConfig, QubitParams};
use crate::error::ConfigError;
use crate::evolution::IntegratorConfig;
use crate::phase::PhaseWindow;

/// Polar-angle grid of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    /// Sample exactly `min` and `max`; otherwise the grid is offset by half
    /// a step from both ends.
    pub include_endpoints: bool,
    pub window: PhaseWindow,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            count: 200,
            min: 0.0,
            max: std::f64::consts::PI,
            include_endpoints: false,
            window: PhaseWindow::ZeroToTwoPi,
        }
    }
}

impl SweepSpec {
    pub fn thetas(&self) -> Vec<f64> {
        let n = self.count;
        let span = self.max - self.min;
        if self.include_endpoints {
            (0..n)
                .map(|j| self.min + span * j as f64 / (n - 1) as f64)
                .collect()
        } else {
            (0..n)
                .map(|j| self.min + span * (j as f64 + 0.5) / n as f64)
                .collect()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<PathBuf>,
}

/// One sweep experiment. Serialized as TOML with sections `[qubit]`,
/// `[bath]`, `[generator]`, `[integrator]`, `[sweep]` and `[output]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub qubit: QubitParams,
    #[serde(default)]
    pub bath: BathParams,
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn invalid(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.qubit.validate().map_err(|e| invalid("qubit", e))?;
        self.bath.validate().map_err(|e| invalid("bath", e))?;
        self.generator
            .quadrature
            .validate()
            .map_err(|e| invalid("generator.quadrature", e))?;
        self.integrator.validate().map_err(|e| invalid("integrator", e))?;
        let s = &self.sweep;
        if s.count < 2 {
            return Err(invalid("sweep.count", format!("must be >= 2, got {}", s.count)));
        }
        let pi = std::f64::consts::PI;
        if !(0.0 <= s.min && s.min < s.max && s.max <= pi) {
            return Err(invalid(
                "sweep.min/sweep.max",
                format!("need 0 <= min < max <= pi, got [{}, {}]", s.min, s.max),
            ));
        }
        Ok(())
    }

    /// `key=value` pairs echoed into output metadata, in a fixed order.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let q = &self.generator.quadrature;
        let c0 = self
            .bath
            .c0_override_temperature
            .map_or_else(|| "none".to_string(), |t| format!("{t}"));
        vec![
            ("epsilon", format!("{}", self.qubit.epsilon)),
            ("mu_x", format!("{}", self.qubit.mu_x)),
            ("mu_z", format!("{}", self.qubit.mu_z)),
            ("alpha", format!("{}", self.bath.alpha)),
            ("omega_c", format!("{}", self.bath.omega_c)),
            ("temperature", format!("{}", self.bath.temperature)),
            ("dephasing_rate_override", c0),
            ("lamb_shift", format!("{}", self.generator.lamb_shift)),
            ("pv_integration_halfwidth", format!("{}", q.integration_halfwidth)),
            ("pv_window_halfwidth", format!("{}", q.window_halfwidth)),
            ("pv_rel_tol", format!("{}", q.rel_tol)),
            ("pv_max_subdivisions", format!("{}", q.max_subdivisions)),
            ("method", format!("{:?}", self.integrator.method).to_lowercase()),
            ("steps_per_period", format!("{}", self.integrator.steps_per_period)),
            ("periods", format!("{}", self.integrator.periods)),
            ("theta_count", format!("{}", self.sweep.count)),
            ("theta_min", format!("{}", self.sweep.min)),
            ("theta_max", format!("{}", self.sweep.max)),
            ("include_endpoints", format!("{}", self.sweep.include_endpoints)),
            ("window", window_name(self.sweep.window).to_string()),
        ]
    }
}

pub fn window_name(w: PhaseWindow) -> &'static str {
    match w {
        PhaseWindow::ZeroToTwoPi => "zero2pi",
        PhaseWindow::MinusPiToPi => "pmpi",
    }
}
