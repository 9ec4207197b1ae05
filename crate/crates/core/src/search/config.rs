use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::mdp::RewardSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UcbVariant {
    /// `V + C * sqrt(ln(parent_N) / N)`.
    ParentVisits,
    /// `V + C * sqrt(ln(N) / N)`.
    NodeVisits,
}

/// Upper confidence bound of a child with mean value `mean` and `visits`
/// visits under a parent visited `parent_visits` times.
pub fn ucb_score(
    mean: f64,
    visits: u64,
    parent_visits: u64,
    c: f64,
    variant: UcbVariant,
) -> Result<f64, SearchError> {
    if visits == 0 {
        return Err(SearchError::Domain("node visit count is zero".into()));
    }
    let numerator = match variant {
        UcbVariant::ParentVisits => {
            if parent_visits == 0 {
                return Err(SearchError::Domain("parent visit count is zero".into()));
            }
            parent_visits
        }
        UcbVariant::NodeVisits => visits,
    };
    Ok(mean + c * ((numerator as f64).ln() / visits as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub exploration_c: f64,
    pub max_expansion_trials: u32,
    pub max_children: usize,
    pub max_iterations: u32,
    pub ucb_variant: UcbVariant,
    pub seed: u64,
    pub reward: RewardSpec,
    /// Stop before the policy would have produced more than this many
    /// candidates in total.
    pub sample_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exploration_c: 1.0,
            max_expansion_trials: 10,
            max_children: 10,
            max_iterations: 512,
            ucb_variant: UcbVariant::ParentVisits,
            seed: 0,
            reward: RewardSpec::default(),
            sample_budget: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::Config(m));
        if !(self.exploration_c.is_finite() && self.exploration_c >= 0.0) {
            return bad(format!("exploration_c must be >= 0, got {}", self.exploration_c));
        }
        if self.max_expansion_trials == 0 {
            return bad("max_expansion_trials must be >= 1".into());
        }
        if self.max_children == 0 {
            return bad("max_children must be >= 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1".into());
        }
        if self.sample_budget == Some(0) {
            return bad("sample_budget must be >= 1".into());
        }
        self.reward.validate().map_err(|e| SearchError::Config(e.to_string()))
    }
}
