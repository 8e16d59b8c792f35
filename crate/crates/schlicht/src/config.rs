//! Run configuration: tolerances, grid sizes and search settings.
//!
//! Defaults live in the checked-in `default-config.toml`, which is embedded
//! at compile time; a config file overrides the defaults and command-line
//! flags override the file.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loewner::{StepControl, TailConfig};
use crate::polyext::SearchConfig;

pub const DEFAULT_CONFIG_TOML: &str = include_str!("../default-config.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub branch: f64,
    pub quadrature: f64,
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub certification: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub boundary_samples: usize,
    pub coefficient_samples: usize,
    pub coefficient_radius: f64,
    pub gridsize: usize,
    pub path_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoewnerSettings {
    pub horizon: f64,
    pub tail_offset: f64,
    pub chain_limit_horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    pub multistarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub start_spread: f64,
    pub coarse_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Document,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub grids: Grids,
    pub loewner: LoewnerSettings,
    pub search: SearchSettings,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_toml_str(DEFAULT_CONFIG_TOML).expect("embedded defaults parse")
    }
}

impl RunConfig {
    /// Parses and validates a TOML configuration.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.branch", t.branch),
            ("tolerances.quadrature", t.quadrature),
            ("tolerances.ode_rel", t.ode_rel),
            ("tolerances.ode_abs", t.ode_abs),
            ("tolerances.certification", t.certification),
            ("grids.coefficient_radius", self.grids.coefficient_radius),
            ("loewner.horizon", self.loewner.horizon),
            ("loewner.tail_offset", self.loewner.tail_offset),
            ("loewner.chain_limit_horizon", self.loewner.chain_limit_horizon),
            ("search.start_spread", self.search.start_spread),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parse(format!("{name} must be positive and finite")));
            }
        }
        if self.grids.coefficient_radius >= 1.0 {
            return Err(Error::Parse("grids.coefficient_radius must be below 1".into()));
        }
        if self.grids.coefficient_samples < 64 || !self.grids.coefficient_samples.is_power_of_two()
        {
            return Err(Error::Parse(
                "grids.coefficient_samples must be a power of two >= 64".into(),
            ));
        }
        if self.grids.boundary_samples < 512 || self.grids.boundary_samples % 2 != 0 {
            return Err(Error::Parse("grids.boundary_samples must be even and >= 512".into()));
        }
        if self.grids.gridsize < 4 {
            return Err(Error::Parse("grids.gridsize must be at least 4".into()));
        }
        if self.grids.path_samples < 16 {
            return Err(Error::Parse("grids.path_samples must be at least 16".into()));
        }
        if self.search.multistarts == 0 || self.search.max_iters == 0 {
            return Err(Error::Parse("search settings must be positive".into()));
        }
        if self.loewner.tail_offset < 20.0 {
            return Err(Error::Parse("loewner.tail_offset must be at least 20".into()));
        }
        Ok(())
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.tolerances.ode_rel,
            abs_tol: self.tolerances.ode_abs,
            ..StepControl::default()
        }
    }

    pub fn tail_config(&self) -> TailConfig {
        TailConfig {
            extraction_radius: self.grids.coefficient_radius,
            extraction_samples: self.grids.coefficient_samples,
            tail_offset: self.loewner.tail_offset,
            control: self.step_control(),
        }
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            multistarts: self.search.multistarts,
            max_iters: self.search.max_iters,
            seed: self.search.seed,
            coarse_samples: self.search.coarse_samples,
            fine_samples: self.grids.boundary_samples,
            xtol: 1e-9,
            start_spread: self.search.start_spread,
        }
    }
}
