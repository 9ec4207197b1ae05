//! Self-generated goal-conditioned MDP.
//!
//! A goal-conditioned MDP whose agent may push its own subgoals onto an
//! ordered goal stack. The transition function [`step`] has exactly four
//! cases: an invalid action is a no-op, a goal proposal pushes a goal, a
//! primitive that solves the top goal pops it, and any other primitive
//! progresses the state while leaving the stack alone.
//!
//! Everything in this module is generic over an [`Environment`], which
//! supplies the validity predicates, the underlying state transition and
//! the binary "goal solved" reward.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised by an environment while initialising or transitioning.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct EnvError(pub String);

impl EnvError {
    pub fn new(msg: impl Into<String>) -> Self {
        EnvError(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdpError {
    #[error("goal stack is empty; the episode is already terminal")]
    EmptyGoalStack,
    #[error("environment rejected a validated action: {0}")]
    Environment(#[from] EnvError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid reward spec: {0}")]
pub struct RewardSpecError(pub String);

/// Ordered stack of open goals. The bottom element is the root goal.
///
/// Only the top and the root are observable; interior goals are reachable
/// solely through [`GoalStack::render`], for logging.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoalStack<G> {
    goals: Vec<G>,
}

impl<G> GoalStack<G> {
    pub fn new(root: G) -> Self {
        GoalStack { goals: vec![root] }
    }

    /// The last element of the stack, the goal the policy conditions on.
    pub fn top(&self) -> Option<&G> {
        self.goals.last()
    }

    pub fn root(&self) -> Option<&G> {
        self.goals.first()
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    /// Text form of every goal, bottom first.
    pub fn render(&self, f: impl Fn(&G) -> String) -> Vec<String> {
        self.goals.iter().map(f).collect()
    }
}

impl<G: Clone> GoalStack<G> {
    /// Same stack with `goal` as the new top.
    pub fn push(&self, goal: G) -> Self {
        let mut goals = self.goals.clone();
        goals.push(goal);
        GoalStack { goals }
    }

    /// Same stack without its last element.
    pub fn remove_last(&self) -> Self {
        let mut goals = self.goals.clone();
        goals.pop();
        GoalStack { goals }
    }
}

/// How the sG-MDP layer sees a candidate action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionClass {
    Primitive,
    GoalProposal,
    Invalid,
}

/// Which of the four transition cases fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionCase {
    NoOp,
    GoalPushed,
    GoalSolved,
    Progressed,
}

impl TransitionCase {
    /// Change in goal-stack length implied by the case.
    pub fn stack_delta(self) -> isize {
        match self {
            TransitionCase::GoalPushed => 1,
            TransitionCase::GoalSolved => -1,
            TransitionCase::NoOp | TransitionCase::Progressed => 0,
        }
    }
}

impl fmt::Display for TransitionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TransitionCase::NoOp => "NoOp",
            TransitionCase::GoalPushed => "GoalPushed",
            TransitionCase::GoalSolved => "GoalSolved",
            TransitionCase::Progressed => "Progressed",
        };
        f.write_str(s)
    }
}

/// Interface a formal system must provide to be searched.
///
/// Implementations must be deterministic: identical inputs give identical
/// outputs. Operations receive at most the top goal, never the interior of
/// the stack.
pub trait Environment: Send + Sync {
    type State: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Goal: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Task: Send + Sync;

    /// Initial state and root goal of a task.
    fn initial(&self, task: &Self::Task) -> Result<(Self::State, Self::Goal), EnvError>;

    /// IsGoal: the action is a well-formed conjecture acceptable here.
    fn is_goal(&self, state: &Self::State, top: &Self::Goal, action: &str) -> bool;

    /// IsPrimitiveAction: the action is a valid tactic on the top goal.
    fn is_primitive(&self, state: &Self::State, top: &Self::Goal, action: &str) -> bool;

    /// ToGoal: the goal a goal-proposal action denotes.
    fn to_goal(&self, action: &str) -> Option<Self::Goal>;

    /// T: apply a primitive action to the goal.
    fn apply(
        &self,
        state: &Self::State,
        action: &str,
        goal: &Self::Goal,
    ) -> Result<Self::State, EnvError>;

    /// Solves: whether the primitive closes the goal.
    fn solves(&self, state: &Self::State, action: &str, goal: &Self::Goal) -> bool;

    /// Base reward predicate: the goal counts as solved in the state.
    fn goal_solved(&self, state: &Self::State, goal: &Self::Goal) -> bool;

    /// Apply and Solves in one pass. Environments that compute both at once
    /// should override this.
    fn transition(
        &self,
        state: &Self::State,
        action: &str,
        goal: &Self::Goal,
    ) -> Result<(Self::State, bool), EnvError> {
        let solved = self.solves(state, action, goal);
        Ok((self.apply(state, action, goal)?, solved))
    }

    /// Independent verifier for a complete action script.
    fn check_proof(&self, task: &Self::Task, actions: &[String]) -> bool;

    fn render_state(&self, state: &Self::State) -> String;

    fn render_goal(&self, goal: &Self::Goal) -> String;
}

/// Classify a candidate action. `GoalProposal` wins over `Primitive`.
pub fn classify_action<E: Environment>(
    env: &E,
    state: &E::State,
    top: &E::Goal,
    action: &str,
) -> ActionClass {
    if action.trim().is_empty() {
        return ActionClass::Invalid;
    }
    if env.is_goal(state, top, action) {
        ActionClass::GoalProposal
    } else if env.is_primitive(state, top, action) {
        ActionClass::Primitive
    } else {
        ActionClass::Invalid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOutcome<S, G> {
    pub next_state: S,
    pub next_goals: GoalStack<G>,
    pub case: TransitionCase,
    /// The bottom (root) goal was popped by this transition.
    pub solved_root: bool,
}

/// Line-oriented log record of a transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub case: TransitionCase,
    pub state: String,
    pub goals: Vec<String>,
    pub solved_root: bool,
}

impl<S, G: Clone> TransitionOutcome<S, G> {
    pub fn record<E>(&self, env: &E) -> TransitionRecord
    where
        E: Environment<State = S, Goal = G>,
    {
        TransitionRecord {
            case: self.case,
            state: env.render_state(&self.next_state),
            goals: self.next_goals.render(|g| env.render_goal(g)),
            solved_root: self.solved_root,
        }
    }
}

/// The transition function over (state, goal stack).
pub fn step<E: Environment>(
    env: &E,
    state: &E::State,
    goals: &GoalStack<E::Goal>,
    action: &str,
) -> Result<TransitionOutcome<E::State, E::Goal>, MdpError> {
    let top = goals.top().ok_or(MdpError::EmptyGoalStack)?;
    let unchanged = |case| TransitionOutcome {
        next_state: state.clone(),
        next_goals: goals.clone(),
        case,
        solved_root: false,
    };
    match classify_action(env, state, top, action) {
        ActionClass::Invalid => Ok(unchanged(TransitionCase::NoOp)),
        ActionClass::GoalProposal => match env.to_goal(action) {
            Some(goal) => Ok(TransitionOutcome {
                next_state: state.clone(),
                next_goals: goals.push(goal),
                case: TransitionCase::GoalPushed,
                solved_root: false,
            }),
            None => Ok(unchanged(TransitionCase::NoOp)),
        },
        ActionClass::Primitive => {
            let (next_state, solved) = env.transition(state, action, top)?;
            if solved {
                Ok(TransitionOutcome {
                    next_state,
                    next_goals: goals.remove_last(),
                    case: TransitionCase::GoalSolved,
                    solved_root: goals.len() == 1,
                })
            } else {
                Ok(TransitionOutcome {
                    next_state,
                    next_goals: goals.clone(),
                    case: TransitionCase::Progressed,
                    solved_root: false,
                })
            }
        }
    }
}

/// Value-estimation recipe for freshly created search nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimationRecipe {
    RootOnly,
    SolvedConjectureCount { conjecture_weight: f64 },
    DepthWeighted { depth_weight: f64 },
    Combined { conjecture_weight: f64, depth_weight: f64 },
}

impl EstimationRecipe {
    pub fn conjecture_weight(&self) -> f64 {
        match *self {
            EstimationRecipe::SolvedConjectureCount { conjecture_weight }
            | EstimationRecipe::Combined { conjecture_weight, .. } => conjecture_weight,
            _ => 0.0,
        }
    }

    pub fn depth_weight(&self) -> f64 {
        match *self {
            EstimationRecipe::DepthWeighted { depth_weight }
            | EstimationRecipe::Combined { depth_weight, .. } => depth_weight,
            _ => 0.0,
        }
    }
}

/// Reward shaping parameters: `lambda` weights the top-goal term, `gamma`
/// discounts trajectory returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardSpec {
    pub lambda: f64,
    pub gamma: f64,
    pub recipe: EstimationRecipe,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec {
            lambda: 0.5,
            gamma: 1.0,
            recipe: EstimationRecipe::Combined {
                conjecture_weight: 0.1,
                depth_weight: 0.01,
            },
        }
    }
}

impl RewardSpec {
    pub fn validate(&self) -> Result<(), RewardSpecError> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(RewardSpecError(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(RewardSpecError(format!("gamma must be in (0, 1], got {}", self.gamma)));
        }
        for w in [self.recipe.conjecture_weight(), self.recipe.depth_weight()] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(RewardSpecError(format!("recipe weights must be finite and >= 0, got {w}")));
            }
        }
        Ok(())
    }
}

/// Root-goal indicator plus `lambda` times the top-goal indicator.
///
/// On an empty stack the top-goal term inherits the root term, so a
/// finished proof earns `1 + lambda`.
pub fn shaped_reward<E: Environment>(
    env: &E,
    state: &E::State,
    goals: &GoalStack<E::Goal>,
    root: &E::Goal,
    spec: &RewardSpec,
) -> f64 {
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let r0 = indicator(env.goal_solved(state, root));
    let rt = match goals.top() {
        Some(top) => indicator(env.goal_solved(state, top)),
        None => r0,
    };
    r0 + spec.lambda * rt
}

/// `sum_t gamma^t * r_t`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut discount = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    total
}
