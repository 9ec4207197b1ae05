use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{DeterminismClass, Policy, PolicyError};
use crate::mdp::Environment;
use crate::prop::{applicable_tactics, conjecture_tactics, Goal, ProofState, PropEnv, Tactic};

/// Canonical candidate list for the top goal: applicable primitives, then
/// acceptable `have` proposals.
fn enumerate(env: &PropEnv, state: &ProofState, goal: &Goal, conjectures: bool) -> Vec<Tactic> {
    let Some((seq, pending)) = env.active_sequent(state, goal) else {
        return Vec::new();
    };
    let mut out = applicable_tactics(&seq);
    if conjectures && !pending {
        out.extend(
            conjecture_tactics(&seq)
                .into_iter()
                .filter(|t| env.is_goal(state, goal, &t.to_string())),
        );
    }
    out
}

/// Deterministic backend: the first `k` entries of the canonical list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationPolicy {
    pub conjectures: bool,
}

impl Default for EnumerationPolicy {
    fn default() -> Self {
        EnumerationPolicy { conjectures: true }
    }
}

impl Policy<PropEnv> for EnumerationPolicy {
    fn sample_candidates(
        &self,
        env: &PropEnv,
        state: &ProofState,
        goal: &Goal,
        k: usize,
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<String>, PolicyError> {
        Ok(enumerate(env, state, goal, self.conjectures)
            .into_iter()
            .take(k)
            .map(|t| t.to_string())
            .collect())
    }

    fn determinism(&self) -> DeterminismClass {
        DeterminismClass::Deterministic
    }
}

/// Sampling weight per tactic kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TacticWeights {
    pub exact: f64,
    pub intro: f64,
    pub apply: f64,
    pub split: f64,
    pub disjunct: f64,
    pub cases: f64,
    pub have: f64,
}

impl Default for TacticWeights {
    fn default() -> Self {
        TacticWeights {
            exact: 6.0,
            intro: 3.0,
            apply: 3.0,
            split: 3.0,
            disjunct: 2.0,
            cases: 1.5,
            have: 1.5,
        }
    }
}

impl TacticWeights {
    fn weight(&self, t: &Tactic) -> f64 {
        match t {
            Tactic::Exact(_) => self.exact,
            Tactic::Intro(_) => self.intro,
            Tactic::Apply(_) => self.apply,
            Tactic::Split => self.split,
            Tactic::Left | Tactic::Right => self.disjunct,
            Tactic::Cases(_) => self.cases,
            Tactic::Have(..) => self.have,
        }
    }
}

/// Seeded backend: draws without replacement from the canonical list,
/// weighted by tactic kind. Each slot is replaced by a malformed candidate
/// with probability `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticPolicy {
    pub epsilon: f64,
    pub weights: TacticWeights,
    pub conjectures: bool,
}

impl Default for StochasticPolicy {
    fn default() -> Self {
        StochasticPolicy {
            epsilon: 0.0,
            weights: TacticWeights::default(),
            conjectures: true,
        }
    }
}

impl StochasticPolicy {
    pub fn with_epsilon(epsilon: f64) -> Self {
        StochasticPolicy {
            epsilon,
            ..Self::default()
        }
    }
}

const MALFORMED: [&str; 6] = ["exact ?", "apply ?", "intro", "cases", "sorry", "have : ?"];

fn malformed(rng: &mut dyn RngCore, slot: usize) -> String {
    let base = MALFORMED[rng.gen_range(0..MALFORMED.len())];
    format!("{base}{slot}")
}

impl Policy<PropEnv> for StochasticPolicy {
    fn sample_candidates(
        &self,
        env: &PropEnv,
        state: &ProofState,
        goal: &Goal,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<String>, PolicyError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(PolicyError::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        let mut pool = enumerate(env, state, goal, self.conjectures);
        let mut weights: Vec<f64> = pool.iter().map(|t| self.weights.weight(t)).collect();
        let mut out = Vec::with_capacity(k);
        for slot in 0..k {
            if rng.gen_bool(self.epsilon) {
                out.push(malformed(rng, slot));
                continue;
            }
            let Ok(dist) = WeightedIndex::new(&weights) else {
                break;
            };
            let i = dist.sample(rng);
            out.push(pool.remove(i).to_string());
            weights.remove(i);
        }
        Ok(out)
    }

    fn determinism(&self) -> DeterminismClass {
        DeterminismClass::SeededStochastic
    }
}
