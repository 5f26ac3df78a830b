//! Experiment parameter records, their defaults, and config-file loading.
//!
//! Every subcommand resolves its parameters in three layers: built-in
//! defaults, then a flat TOML config file (`--config`), then the global
//! command-line overrides (`--seed`, `--trials`). Unknown config keys are
//! errors. The resolved record is embedded verbatim in the run manifest,
//! which is what makes a manifest replayable.

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

use basislab::greedy::{GreedyConfig, SelectionRule};
use basislab::random_basis::{FamilyParams, RandomBasisConfig};

pub const EXPERIMENT_TOL: f64 = 0.037 * std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRuleParam {
    EpsilonFirstStep,
    EpsilonEveryStep,
}

impl From<SelectionRuleParam> for SelectionRule {
    fn from(p: SelectionRuleParam) -> Self {
        match p {
            SelectionRuleParam::EpsilonFirstStep => SelectionRule::EpsilonFirstStep,
            SelectionRuleParam::EpsilonEveryStep => SelectionRule::EpsilonEveryStep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreedyParams {
    pub trials: u64,
    pub steps: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub m_prime: f64,
    pub m_dprime: f64,
    pub sel_eps: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub max_draws: usize,
    pub selection: SelectionRuleParam,
}

impl Default for GreedyParams {
    fn default() -> Self {
        Self {
            trials: 100,
            steps: 100,
            grid_size: 1000,
            seed: 1,
            m_prime: 1.5,
            m_dprime: 2.0,
            sel_eps: 1e-6,
            w_min: 0.0,
            w_max: 200.0,
            b_min: -100.0,
            b_max: 0.0,
            max_draws: 100_000,
            selection: SelectionRuleParam::EpsilonEveryStep,
        }
    }
}

impl GreedyParams {
    pub fn to_config(&self, seed: u64) -> GreedyConfig {
        GreedyConfig {
            m_prime: self.m_prime,
            m_dprime: self.m_dprime,
            sel_eps: self.sel_eps,
            w_range: (self.w_min, self.w_max),
            b_range: (self.b_min, self.b_max),
            max_draws: self.max_draws,
            grid_size: self.grid_size,
            seed,
            selection: self.selection.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyParam {
    Gaussian,
    Indicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomParams {
    pub trials: u64,
    pub steps: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub family: FamilyParam,
    pub w_min: f64,
    pub w_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond_limit: Option<f64>,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            trials: 100,
            steps: 100,
            grid_size: 1000,
            seed: 1,
            family: FamilyParam::Gaussian,
            w_min: 0.0,
            w_max: 200.0,
            b_min: -200.0,
            b_max: 200.0,
            a_min: 0.0,
            a_max: 1.0,
            sigma_min: 0.0,
            sigma_max: 1.0,
            cond_limit: None,
        }
    }
}

impl RandomParams {
    pub fn to_config(&self, seed: u64) -> RandomBasisConfig {
        let family = match self.family {
            FamilyParam::Gaussian => FamilyParams::Gaussian {
                w_range: (self.w_min, self.w_max),
                b_range: (self.b_min, self.b_max),
            },
            FamilyParam::Indicator => FamilyParams::Indicator {
                a_range: (self.a_min, self.a_max),
                sigma_range: (self.sigma_min, self.sigma_max),
            },
        };
        RandomBasisConfig {
            family,
            n_steps: self.steps,
            grid_size: self.grid_size,
            seed,
            cond_limit: self.cond_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupParams {
    pub trials: u64,
    pub steps: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub a_min: f64,
    pub a_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond_limit: Option<f64>,
}

impl Default for BlowupParams {
    fn default() -> Self {
        Self {
            trials: 20,
            steps: 500,
            grid_size: 1000,
            seed: 1,
            a_min: 0.0,
            a_max: 1.0,
            sigma_min: 0.0,
            sigma_max: 1.0,
            cond_limit: None,
        }
    }
}

impl BlowupParams {
    pub fn to_config(&self, seed: u64) -> RandomBasisConfig {
        RandomBasisConfig {
            family: FamilyParams::Indicator {
                a_range: (self.a_min, self.a_max),
                sigma_range: (self.sigma_min, self.sigma_max),
            },
            n_steps: self.steps,
            grid_size: self.grid_size,
            seed,
            cond_limit: self.cond_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsParams {
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub theta_list: Vec<f64>,
}

impl Default for BoundsParams {
    fn default() -> Self {
        Self {
            n_list: vec![1000],
            eps_list: vec![0.1],
            theta_list: vec![0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainsParams {
    pub n_list: Vec<usize>,
    /// Chains grown per dimension.
    pub trials: u64,
    pub seed: u64,
    /// Half-width of the angle band around pi/2, radians.
    pub tol: f64,
    pub max_length: usize,
    /// Orthogonality tolerance of the overlaid theoretical bounds
    /// (the cosine-scale counterpart of `tol`).
    pub bound_eps: f64,
    pub bound_theta: f64,
}

impl Default for ChainsParams {
    fn default() -> Self {
        Self {
            n_list: vec![400, 800, 1600, 3200],
            trials: 20,
            seed: 1,
            tol: EXPERIMENT_TOL,
            max_length: 1_000_000,
            bound_eps: 0.0581,
            bound_theta: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnglesParams {
    pub n: usize,
    pub count: usize,
    pub bins: usize,
    pub seed: u64,
}

impl Default for AnglesParams {
    fn default() -> Self {
        Self {
            n: 1920,
            count: 10_000,
            bins: 50,
            seed: 1,
        }
    }
}

/// Load a flat TOML config file into a parameter record; unknown keys are
/// errors, missing keys take their defaults.
pub fn load_config<P: Default + DeserializeOwned>(path: Option<&Path>) -> Result<P> {
    match path {
        None => Ok(P::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config file {}", p.display()))
        }
    }
}
