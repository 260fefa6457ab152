//! Run configuration: a TOML file with an optional top-level `seed` and one
//! section per command.

use std::path::Path;

use jointcok::montecarlo::{ExperimentPlan, Transform};
use jointcok::{EntrySampler, PGroupType, Partition};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheorySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invert: Option<InvertSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonabelian: Option<NonabelianSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snf: Option<SnfSection>,
}

fn default_z() -> f64 {
    3.0
}

fn default_sampler() -> String {
    "uniform".into()
}

fn default_arity() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySection {
    pub p: u64,
    /// `marginal`, `shifts`, `pshift` or `independent`.
    pub model: String,
    #[serde(default)]
    pub u: u32,
    #[serde(default)]
    pub targets: Vec<String>,
}

/// Shared by `[simulate]` and `[moment]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub p: u64,
    pub k: u32,
    #[serde(default)]
    pub u: usize,
    pub sizes: Vec<usize>,
    pub trials: u64,
    #[serde(default = "default_sampler")]
    pub sampler: String,
    pub transforms: Vec<String>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default = "default_z")]
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub p: u64,
    #[serde(default)]
    pub u: usize,
    pub sizes: Vec<usize>,
    pub trials: u64,
    /// `log`, `log:<scale>` or `const:<alpha>`.
    pub schedule: String,
    #[serde(default = "default_z")]
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertSection {
    pub primes: Vec<u64>,
    pub max_exp: Vec<u32>,
    pub max_rank: usize,
    #[serde(default = "default_arity")]
    pub arity: usize,
    /// `unit` for the all-ones table, otherwise a CSV path.
    pub moments: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_f: Option<f64>,
    #[serde(default)]
    pub fixed_point: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonabelianSection {
    pub h1: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<String>,
    #[serde(default)]
    pub u: usize,
    pub ns: Vec<usize>,
    /// Number of `b_i` taken as `x_i^{-1}`; the rest are the empty word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    /// Explicit `b_1 … b_{n+u}`, for a single `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    #[serde(default)]
    pub pair_sets: bool,
    #[serde(default)]
    pub mc_trials: u64,
    #[serde(default = "default_z")]
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnfSection {
    /// `p k rows cols` followed by the entries.
    pub matrix: String,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Canonical text of this config; re-running it reproduces the outputs.
    pub fn canonical(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// `[2,1]|[]` as a tuple of groups over `p`.
pub fn parse_tuple(p: u64, s: &str) -> CliResult<Vec<PGroupType>> {
    s.split('|')
        .map(|part| {
            let lambda: Partition = part.trim().parse()?;
            Ok(PGroupType::new(p, lambda)?)
        })
        .collect()
}

pub fn parse_tuples(p: u64, list: &[String]) -> CliResult<Vec<Vec<PGroupType>>> {
    list.iter().map(|s| parse_tuple(p, s)).collect()
}

impl SimulateSection {
    pub fn plan(&self, seed: u64) -> CliResult<ExperimentPlan> {
        let sampler: EntrySampler = self.sampler.parse()?;
        let transforms = self
            .transforms
            .iter()
            .map(|t| t.parse::<Transform>())
            .collect::<Result<Vec<_>, _>>()?;
        let plan = ExperimentPlan {
            p: self.p,
            k: self.k,
            u: self.u,
            sizes: self.sizes.clone(),
            trials: self.trials,
            sampler,
            transforms,
            targets: parse_tuples(self.p, &self.targets)?,
            seed,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let text = r#"
seed = 9
[simulate]
p = 3
k = 2
sizes = [10, 20]
trials = 100
transforms = ["shift:0", "shift:1"]
targets = ["[]|[]", "[1]|[]"]
"#;
        let c = RunConfig::parse(text).unwrap();
        let canon = c.canonical().unwrap();
        assert_eq!(RunConfig::parse(&canon).unwrap(), c);
        assert_eq!(RunConfig::parse(&canon).unwrap().canonical().unwrap(), canon);
        let plan = c.simulate.unwrap().plan(9).unwrap();
        assert_eq!(plan.targets[1][0], PGroupType::of(3, &[1]));
        assert_eq!(plan.sampler, EntrySampler::HaarUniform);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::parse("[theory]\np = 2\nmodel = \"marginal\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
