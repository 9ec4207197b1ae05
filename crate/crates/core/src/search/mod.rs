//! Conjecture-aware Monte Carlo tree search over the goal-stack MDP.
//!
//! Each iteration selects an `Open` node by UCB descent, asks the policy for
//! candidates until one yields a new child, scores the child from verified
//! outcomes only, and backs the score up the selected path.

mod config;
mod replay;
mod trace;
mod tree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mdp::{shaped_reward, step, EnvError, Environment, GoalStack, RewardSpec, TransitionCase};
use crate::policy::Policy;

pub use config::{ucb_score, SearchConfig, UcbVariant};
pub use replay::{replay_trace, Replay, ReplayViolation, ReplayedNode};
pub use trace::{parse_trace, trace_to_jsonl, StatusChange, TraceRecord};
pub use tree::{backpropagate, extract_proof, select, NodeStatus, SearchNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no node is eligible for expansion")]
    NoSelectableNode,
    #[error("node {0} still has open goals")]
    NotTerminal(usize),
    #[error(transparent)]
    Environment(#[from] EnvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchOutcome {
    Proved,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Proved,
    IterationLimit,
    NoSelectableNode,
    SampleBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub proof: Option<Vec<String>>,
    pub iterations_used: u32,
    pub nodes_created: usize,
    pub policy_samples_used: u64,
    pub stop_reason: StopReason,
    pub trace: Vec<TraceRecord>,
}

/// What one expansion attempt produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Expansion {
    Child(usize),
    Exhausted,
    /// The sample budget ran out before a child was found.
    OutOfBudget,
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Value of a fresh node: the shaped reward plus the recipe's bonuses.
pub fn estimate<E: Environment>(
    env: &E,
    node: &SearchNode<E::State, E::Goal>,
    root: &E::Goal,
    spec: &RewardSpec,
) -> f64 {
    shaped_reward(env, &node.state, &node.goals, root, spec)
        + spec.recipe.conjecture_weight() * node.solved_conjectures as f64
        + spec.recipe.depth_weight() * node.depth as f64
}

/// A search in progress. The tree is exposed for inspection.
pub struct Search<'a, E: Environment, P: Policy<E> + ?Sized> {
    env: &'a E,
    policy: &'a P,
    task: &'a E::Task,
    config: SearchConfig,
    root_goal: E::Goal,
    nodes: Vec<SearchNode<E::State, E::Goal>>,
    rng: ChaCha8Rng,
    samples_used: u64,
    iterations: u32,
    proof: Option<Vec<String>>,
    trace: Vec<TraceRecord>,
    pending_changes: Vec<StatusChange>,
    pending_errors: u32,
}

impl<'a, E: Environment, P: Policy<E> + ?Sized> Search<'a, E, P> {
    pub fn new(env: &'a E, policy: &'a P, task: &'a E::Task, config: SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        let (state, root_goal) = env.initial(task)?;
        let root = SearchNode::root(state, GoalStack::new(root_goal.clone()));
        Ok(Search {
            env,
            policy,
            task,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            root_goal,
            nodes: vec![root],
            samples_used: 0,
            iterations: 0,
            proof: None,
            trace: Vec::new(),
            pending_changes: Vec::new(),
            pending_errors: 0,
        })
    }

    pub fn nodes(&self) -> &[SearchNode<E::State, E::Goal>] {
        &self.nodes
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn samples_used(&self) -> u64 {
        self.samples_used
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    fn budget_left(&self) -> u64 {
        self.config
            .sample_budget
            .map_or(u64::MAX, |b| b.saturating_sub(self.samples_used))
    }

    fn set_status(&mut self, node: usize, status: NodeStatus) {
        if self.nodes[node].status != status {
            self.nodes[node].status = status;
            self.pending_changes.push(StatusChange { node, status });
        }
    }

    /// One expansion attempt at `node`: up to `max_expansion_trials`
    /// candidates, stopping at the first that yields a new transition.
    pub fn expand(&mut self, node: usize) -> Expansion {
        let max_trials = self.config.max_expansion_trials;
        self.nodes[node].failed_trials = 0;
        loop {
            let failed = self.nodes[node].failed_trials;
            if failed >= max_trials {
                self.set_status(node, NodeStatus::ExpansionExhausted);
                return Expansion::Exhausted;
            }
            let k = u64::from(max_trials - failed).min(self.budget_left()) as usize;
            if k == 0 {
                return Expansion::OutOfBudget;
            }
            let parent = &self.nodes[node];
            let top = parent.goals.top().expect("open nodes have goals").clone();
            let drawn = self
                .policy
                .sample_candidates(self.env, &parent.state, &top, k, &mut self.rng);
            let mut candidates = match drawn {
                Ok(c) => c,
                Err(_) => {
                    self.samples_used += 1;
                    self.pending_errors += 1;
                    self.nodes[node].failed_trials += 1;
                    continue;
                }
            };
            candidates.truncate(k);
            self.samples_used += candidates.len() as u64;
            for text in &candidates {
                if let Some(child) = self.try_candidate(node, text) {
                    return Expansion::Child(child);
                }
                self.nodes[node].failed_trials += 1;
            }
            self.nodes[node].failed_trials += (k - candidates.len()) as u32;
        }
    }

    fn try_candidate(&mut self, node: usize, text: &str) -> Option<usize> {
        let action = normalize(text);
        let parent = &self.nodes[node];
        if parent
            .children
            .iter()
            .any(|&c| self.nodes[c].action.as_deref() == Some(action.as_str()))
        {
            return None;
        }
        let outcome = step(self.env, &parent.state, &parent.goals, &action).ok()?;
        if outcome.case == TransitionCase::NoOp {
            return None;
        }
        let solved = u32::from(outcome.case == TransitionCase::GoalSolved);
        let mut child = SearchNode::root(outcome.next_state, outcome.next_goals);
        child.parent = Some(node);
        child.action = Some(action);
        child.case = Some(outcome.case);
        child.depth = parent.depth + 1;
        child.solved_conjectures = parent.solved_conjectures + solved;
        let terminal = child.status == NodeStatus::Terminal;
        let id = self.nodes.len();
        self.nodes.push(child);
        self.nodes[node].children.push(id);
        if terminal {
            self.pending_changes.push(StatusChange { node: id, status: NodeStatus::Terminal });
        }
        if self.nodes[node].children.len() >= self.config.max_children {
            self.set_status(node, NodeStatus::ChildrenFull);
        }
        Some(id)
    }

    pub fn estimate(&self, node: usize) -> f64 {
        estimate(self.env, &self.nodes[node], &self.root_goal, &self.config.reward)
    }

    /// Runs one select/expand/estimate/backpropagate round. Returns the
    /// reason to stop, if any.
    pub fn iterate(&mut self) -> Option<StopReason> {
        if self.proof.is_some() {
            return Some(StopReason::Proved);
        }
        if self.iterations >= self.config.max_iterations {
            return Some(StopReason::IterationLimit);
        }
        if self.budget_left() == 0 {
            return Some(StopReason::SampleBudget);
        }
        let path = match select(&self.nodes, &self.config) {
            Ok(p) => p,
            Err(_) => return Some(StopReason::NoSelectableNode),
        };
        self.iterations += 1;
        let samples_before = self.samples_used;
        let target = *path.last().unwrap();
        let expansion = self.expand(target);
        let mut rec = TraceRecord {
            iter: self.iterations,
            selected_path: path.clone(),
            action_text: None,
            child: None,
            case: None,
            reward: None,
            n_root: 0,
            w_root: 0.0,
            status_changes: Vec::new(),
            samples: 0,
            policy_errors: 0,
        };
        let mut stop = None;
        match expansion {
            Expansion::Child(child) => {
                let reward = self.estimate(child);
                let mut full = path;
                full.push(child);
                backpropagate(&mut self.nodes, &full, reward);
                rec.action_text = self.nodes[child].action.clone();
                rec.child = Some(child);
                rec.case = self.nodes[child].case;
                rec.reward = Some(reward);
                if self.nodes[child].status == NodeStatus::Terminal {
                    let proof = extract_proof(&self.nodes, child).expect("terminal node");
                    if self.env.check_proof(self.task, &proof) {
                        self.proof = Some(proof);
                        stop = Some(StopReason::Proved);
                    }
                }
            }
            Expansion::Exhausted => {}
            Expansion::OutOfBudget => stop = Some(StopReason::SampleBudget),
        }
        rec.n_root = self.nodes[0].visits;
        rec.w_root = self.nodes[0].value;
        rec.status_changes = std::mem::take(&mut self.pending_changes);
        rec.samples = self.samples_used - samples_before;
        rec.policy_errors = std::mem::take(&mut self.pending_errors);
        self.trace.push(rec);
        stop
    }

    pub fn run(mut self) -> SearchResult {
        let stop = loop {
            if let Some(reason) = self.iterate() {
                break reason;
            }
        };
        SearchResult {
            outcome: if self.proof.is_some() {
                SearchOutcome::Proved
            } else {
                SearchOutcome::BudgetExhausted
            },
            proof: self.proof,
            iterations_used: self.iterations,
            nodes_created: self.nodes.len(),
            policy_samples_used: self.samples_used,
            stop_reason: stop,
            trace: self.trace,
        }
    }
}

/// Searches for a proof of `task`.
pub fn search<E: Environment, P: Policy<E> + ?Sized>(
    env: &E,
    policy: &P,
    task: &E::Task,
    config: SearchConfig,
) -> Result<SearchResult, SearchError> {
    Ok(Search::new(env, policy, task, config)?.run())
}
