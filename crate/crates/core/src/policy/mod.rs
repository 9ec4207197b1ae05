//! Policies propose candidate actions for the top goal of a node.
//!
//! A policy sees the proof state and the top goal only. It never reads the
//! search tree, and it returns at most `k` candidates in a fixed order.

mod local;
mod remote;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mdp::Environment;

pub use local::{EnumerationPolicy, StochasticPolicy, TacticWeights};
pub use remote::{
    CompletionRequest, CompletionResponse, RemotePolicy, RemotePolicyConfig, DEFAULT_PROMPT_TEMPLATE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeterminismClass {
    /// Same inputs, same candidates.
    Deterministic,
    /// Same inputs and RNG state, same candidates.
    SeededStochastic,
    /// Depends on an external service.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("policy backend failed after {attempts} attempt(s): {reason}")]
    Failure { attempts: u32, reason: String },
    #[error("invalid policy configuration: {0}")]
    Config(String),
}

pub trait Policy<E: Environment>: Send + Sync {
    /// Up to `k` candidate action texts for `goal` in `state`.
    fn sample_candidates(
        &self,
        env: &E,
        state: &E::State,
        goal: &E::Goal,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<String>, PolicyError>;

    fn determinism(&self) -> DeterminismClass;
}

impl<E: Environment, P: Policy<E> + ?Sized> Policy<E> for Box<P> {
    fn sample_candidates(
        &self,
        env: &E,
        state: &E::State,
        goal: &E::Goal,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<String>, PolicyError> {
        (**self).sample_candidates(env, state, goal, k, rng)
    }

    fn determinism(&self) -> DeterminismClass {
        (**self).determinism()
    }
}
