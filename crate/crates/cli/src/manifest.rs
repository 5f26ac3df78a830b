//! Run manifests: the full resolved parameter record plus seeds, failures,
//! and produced files. A manifest alone is enough to re-execute its
//! experiment byte-for-byte.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::params::{
    AnglesParams, BlowupParams, BoundsParams, ChainsParams, GreedyParams, RandomParams,
};

/// A fully resolved experiment: which command with which parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    Greedy(GreedyParams),
    Random(RandomParams),
    ConstBlowup(BlowupParams),
    Bounds(BoundsParams),
    Chains(ChainsParams),
    Angles(AnglesParams),
}

impl ExperimentSpec {
    pub fn command_name(&self) -> &'static str {
        match self {
            Self::Greedy(_) => "greedy",
            Self::Random(_) => "random",
            Self::ConstBlowup(_) => "const-blowup",
            Self::Bounds(_) => "bounds",
            Self::Chains(_) => "chains",
            Self::Angles(_) => "angles",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    #[serde(flatten)]
    pub spec: ExperimentSpec,
    pub seeds: Vec<u64>,
    pub failures: Vec<TrialFailure>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(spec: ExperimentSpec, seeds: Vec<u64>) -> Self {
        Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            spec,
            seeds,
            failures: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        std::fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
