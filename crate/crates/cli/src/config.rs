//! Scenario file parsing. Every section is optional; defaults reproduce the
//! reference setup (4 users on a 500 m disc, α = 3.76, −100 dBm noise,
//! 1 bps/Hz targets, order-10 quadratures, 10⁶ trials).

use anyhow::{bail, Context, Result};
use rsma_core::{QuadOrders, SystemConfig, TargetRates};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub targets: TargetsSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub validation: ValidationSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub users: Option<usize>,
    pub radius_m: Option<f64>,
    pub path_loss_exponent: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub max_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    pub primary: Option<f64>,
    pub secondary: Option<f64>,
    pub first: Option<f64>,
    pub second: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub q: Option<usize>,
    pub n: Option<usize>,
    pub b: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    /// Maximum tolerated MC↔analytic relative deviation where the
    /// probability is above `probability_floor`.
    pub relative_tolerance: Option<f64>,
    pub probability_floor: Option<f64>,
}

macro_rules! default_impl {
    ($t:ty) => {
        impl Default for $t {
            fn default() -> Self {
                // all-None: defaults are applied during resolution
                serde::Deserialize::deserialize(toml::Table::new()).unwrap()
            }
        }
    };
}
default_impl!(SystemSection);
default_impl!(TargetsSection);
default_impl!(QuadratureSection);
default_impl!(SimulationSection);
default_impl!(ValidationSection);

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub cfg: SystemConfig,
    pub trials: u64,
    pub seed: u64,
    pub relative_tolerance: f64,
    pub probability_floor: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            cfg: SystemConfig::default(),
            trials: 1_000_000,
            seed: 42,
            relative_tolerance: 0.05,
            probability_floor: 1e-3,
        }
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let file: ScenarioFile = toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        Settings::resolve(file)
    }

    pub fn resolve(file: ScenarioFile) -> Result<Self> {
        let mut s = Settings::default();
        let def = SystemConfig::default();
        s.cfg = SystemConfig {
            users: file.system.users.unwrap_or(def.users),
            radius: file.system.radius_m.unwrap_or(def.radius),
            alpha: file.system.path_loss_exponent.unwrap_or(def.alpha),
            noise_dbm: file.system.noise_dbm.unwrap_or(def.noise_dbm),
            max_power_dbm: file.system.max_power_dbm.unwrap_or(def.max_power_dbm),
            quad: QuadOrders {
                l: file.quadrature.l.unwrap_or(def.quad.l),
                m: file.quadrature.m.unwrap_or(def.quad.m),
                q: file.quadrature.q.unwrap_or(def.quad.q),
                n: file.quadrature.n.unwrap_or(def.quad.n),
                b: file.quadrature.b.unwrap_or(def.quad.b),
            },
            targets: TargetRates {
                primary: file.targets.primary.unwrap_or(def.targets.primary),
                secondary: file.targets.secondary.unwrap_or(def.targets.secondary),
                first: file.targets.first.unwrap_or(def.targets.first),
                second: file.targets.second.unwrap_or(def.targets.second),
            },
        };
        s.cfg
            .validate()
            .map_err(|e| anyhow::anyhow!("{e}"))
            .context("config field out of domain")?;
        if let Some(t) = file.simulation.trials {
            if t == 0 {
                bail!("simulation.trials must be at least 1");
            }
            s.trials = t;
        }
        if let Some(seed) = file.simulation.seed {
            s.seed = seed;
        }
        if let Some(tol) = file.validation.relative_tolerance {
            if !(tol > 0.0) {
                bail!("validation.relative_tolerance must be positive");
            }
            s.relative_tolerance = tol;
        }
        if let Some(floor) = file.validation.probability_floor {
            if !(floor > 0.0) {
                bail!("validation.probability_floor must be positive");
            }
            s.probability_floor = floor;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_setup() {
        let s = Settings::resolve(ScenarioFile::default()).unwrap();
        assert_eq!(s.cfg, SystemConfig::default());
        assert_eq!(s.trials, 1_000_000);
        assert_eq!(s.seed, 42);
    }

    #[test]
    fn partial_override() {
        let file: ScenarioFile = toml::from_str(
            "[system]\nradius_m = 300.0\n[simulation]\ntrials = 1000\n",
        )
        .unwrap();
        let s = Settings::resolve(file).unwrap();
        assert_eq!(s.cfg.radius, 300.0);
        assert_eq!(s.cfg.users, 4);
        assert_eq!(s.trials, 1000);
    }

    #[test]
    fn unknown_field_is_rejected_with_location() {
        let err = toml::from_str::<ScenarioFile>("[system]\nradios_m = 300.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("radios_m"), "diagnostic should name the field: {msg}");
    }

    #[test]
    fn out_of_domain_value_is_rejected() {
        let file: ScenarioFile = toml::from_str("[system]\npath_loss_exponent = 1.5\n").unwrap();
        assert!(Settings::resolve(file).is_err());
    }
}
