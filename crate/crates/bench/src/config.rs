use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgmdp::policy::{EnumerationPolicy, Policy, PolicyError, RemotePolicy, RemotePolicyConfig, StochasticPolicy};
use sgmdp::prop::PropEnv;
use sgmdp::search::SearchConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid run configuration: {0}")]
    Invalid(String),
}

/// Which policy backend proposes candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Enumeration {
        #[serde(default = "yes")]
        conjectures: bool,
    },
    Stochastic {
        epsilon: f64,
        #[serde(default = "yes")]
        conjectures: bool,
    },
    Remote {
        endpoints: Vec<RemotePolicyConfig>,
    },
}

fn yes() -> bool {
    true
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec::Enumeration { conjectures: true }
    }
}

impl PolicySpec {
    pub fn build(&self) -> Result<Box<dyn Policy<PropEnv>>, PolicyError> {
        Ok(match self {
            PolicySpec::Enumeration { conjectures } => Box::new(EnumerationPolicy { conjectures: *conjectures }),
            PolicySpec::Stochastic { epsilon, conjectures } => {
                if !(0.0..=1.0).contains(epsilon) {
                    return Err(PolicyError::Config(format!("epsilon must lie in [0, 1], got {epsilon}")));
                }
                Box::new(StochasticPolicy { conjectures: *conjectures, ..StochasticPolicy::with_epsilon(*epsilon) })
            }
            PolicySpec::Remote { endpoints } => Box::new(RemotePolicy::ensemble(endpoints.clone())?),
        })
    }

    pub fn is_local(&self) -> bool {
        !matches!(self, PolicySpec::Remote { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Line-delimited task records.
    pub corpus: PathBuf,
    pub search: SearchConfig,
    pub policy: PolicySpec,
    /// Policy samples allowed per repetition: the k of pass@k.
    pub sample_budget: u64,
    pub repetitions: u32,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: PathBuf::from("corpus.jsonl"),
            search: SearchConfig::default(),
            policy: PolicySpec::default(),
            sample_budget: 512,
            repetitions: 1,
            workers: None,
            out_dir: PathBuf::from("bench-out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.sample_budget == 0 {
            return bad("sample_budget must be >= 1");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be >= 1");
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1");
        }
        if let PolicySpec::Remote { endpoints } = &self.policy {
            if endpoints.is_empty() {
                return bad("remote policy needs at least one endpoint");
            }
        }
        self.search_config(0).validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Search settings for one repetition: the budget applies and the seed
    /// is replaced.
    pub fn search_config(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            sample_budget: Some(self.sample_budget),
            seed,
            ..self.search
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let text = r#"
            corpus = "tasks.jsonl"
            sample_budget = 64
            repetitions = 3
            seed = 9

            [search]
            max_iterations = 100

            [policy]
            kind = "stochastic"
            epsilon = 0.1
        "#;
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.sample_budget, 64);
        assert_eq!(c.search.max_iterations, 100);
        assert_eq!(c.search.max_children, 10);
        assert_eq!(c.policy, PolicySpec::Stochastic { epsilon: 0.1, conjectures: true });
        c.validate().unwrap();
        let again = RunConfig::from_toml(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn remote_endpoints_need_only_a_url() {
        let text = "[policy]\nkind = \"remote\"\nendpoints = [{ endpoint = \"http://127.0.0.1:9/x\", retries = 1 }]\n";
        let c = RunConfig::from_toml(text).unwrap();
        let PolicySpec::Remote { endpoints } = &c.policy else { panic!() };
        assert_eq!(endpoints[0].retries, 1);
        assert_eq!(endpoints[0].max_tokens, 64);
        assert!(!c.policy.is_local());
    }

    #[test]
    fn invariants() {
        assert!(RunConfig { sample_budget: 0, ..Default::default() }.validate().is_err());
        assert!(RunConfig { repetitions: 0, ..Default::default() }.validate().is_err());
        assert!(RunConfig { workers: Some(0), ..Default::default() }.validate().is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        let remote = RunConfig { policy: PolicySpec::Remote { endpoints: vec![] }, ..Default::default() };
        assert!(remote.validate().is_err());
        assert!(PolicySpec::Stochastic { epsilon: 1.5, conjectures: true }.build().is_err());
    }
}
