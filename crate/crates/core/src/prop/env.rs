use std::fmt;

use serde::{Deserialize, Serialize};

use super::checker::check_proof;
use super::formula::{parse_formula, Formula};
use super::state::{Focus, Goal, Hypothesis, ProofState, Sequent};
use super::tactic::{is_binder_label, parse_tactic, Tactic};
use crate::mdp::{EnvError, Environment};

/// A theorem to prove: labelled hypotheses entail the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Task {
    pub id: String,
    pub hypotheses: Vec<Hypothesis>,
    pub target: Formula,
    /// Length of a shortest `have`-free proof, when known.
    pub oracle_depth: Option<u32>,
}

impl Task {
    pub fn new(id: impl Into<String>, hypotheses: Vec<Hypothesis>, target: Formula) -> Self {
        Task {
            id: id.into(),
            hypotheses,
            target,
            oracle_depth: None,
        }
    }

    /// Parse sequent notation, e.g. `h: A ∧ B, k: C ⊢ B ∧ A`.
    /// `|-` may stand in for `⊢`.
    pub fn parse_sequent(id: impl Into<String>, text: &str) -> Result<Task, EnvError> {
        let (lhs, rhs) = text
            .split_once('⊢')
            .or_else(|| text.split_once("|-"))
            .ok_or_else(|| EnvError::new(format!("missing ⊢ in {text:?}")))?;
        let target = parse_formula(rhs).map_err(|e| EnvError::new(format!("target: {e}")))?;
        let mut hypotheses = Vec::new();
        for part in lhs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            hypotheses.push(parse_hypothesis(part)?);
        }
        let task = Task::new(id, hypotheses, target);
        task.validate()?;
        Ok(task)
    }

    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.hypotheses.clone(), self.target.clone())
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        for (i, h) in self.hypotheses.iter().enumerate() {
            if !is_binder_label(&h.label) {
                return Err(EnvError::new(format!("bad hypothesis label {:?}", h.label)));
            }
            if self.hypotheses[..i].iter().any(|g| g.label == h.label) {
                return Err(EnvError::new(format!("duplicate hypothesis label {:?}", h.label)));
            }
        }
        Ok(())
    }
}

/// Parse `label: formula`.
pub fn parse_hypothesis(text: &str) -> Result<Hypothesis, EnvError> {
    let (label, formula) = text
        .split_once(':')
        .ok_or_else(|| EnvError::new(format!("hypothesis {text:?} needs `label: formula`")))?;
    let formula = parse_formula(formula).map_err(|e| EnvError::new(format!("{text:?}: {e}")))?;
    Ok(Hypothesis::new(label.trim(), formula))
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sequent())
    }
}

/// The propositional calculus as an sG-MDP environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropEnv {
    /// Reject a conjecture whose statement is already an open goal.
    pub dedup_goals: bool,
}

impl Default for PropEnv {
    fn default() -> Self {
        PropEnv { dedup_goals: true }
    }
}

impl PropEnv {
    /// The sequent a tactic on `goal` would act on, and whether the goal is
    /// a pending (not yet materialised) conjecture.
    pub fn active_sequent(&self, state: &ProofState, goal: &Goal) -> Option<(Sequent, bool)> {
        match state.focus(goal).ok()? {
            Focus::Top(frame) => Some((frame.sequents[0].clone(), false)),
            Focus::Pending(seq) => Some((seq, true)),
        }
    }

    fn primitive(&self, action: &str) -> Option<Tactic> {
        parse_tactic(action).filter(|t| !t.is_have())
    }
}

impl Environment for PropEnv {
    type State = ProofState;
    type Goal = Goal;
    type Task = Task;

    fn initial(&self, task: &Task) -> Result<(ProofState, Goal), EnvError> {
        task.validate()?;
        Ok((
            ProofState::new(task.hypotheses.clone(), task.target.clone()),
            Goal::root(task.target.clone()),
        ))
    }

    fn is_goal(&self, state: &ProofState, top: &Goal, action: &str) -> bool {
        let Some(Tactic::Have(label, statement)) = parse_tactic(action) else {
            return false;
        };
        // Conjectures are proposed from the top frame; a pending conjecture
        // has to be worked on before another one is stacked on it.
        let Some(frame) = state.top_frame() else {
            return false;
        };
        if frame.goal != *top || !frame.sequents[0].is_fresh(&label) {
            return false;
        }
        !(self.dedup_goals && state.frames().iter().any(|f| f.goal.statement == statement))
    }

    fn is_primitive(&self, state: &ProofState, top: &Goal, action: &str) -> bool {
        let Some(tactic) = self.primitive(action) else {
            return false;
        };
        match state.focus(top) {
            Ok(focus) => focus.active().refine(&tactic).is_ok(),
            Err(_) => false,
        }
    }

    fn to_goal(&self, action: &str) -> Option<Goal> {
        match parse_tactic(action)? {
            Tactic::Have(label, statement) => Some(Goal::conjecture(label, statement)),
            _ => None,
        }
    }

    fn apply(&self, state: &ProofState, action: &str, goal: &Goal) -> Result<ProofState, EnvError> {
        self.transition(state, action, goal).map(|(s, _)| s)
    }

    fn solves(&self, state: &ProofState, action: &str, goal: &Goal) -> bool {
        let Some(tactic) = self.primitive(action) else {
            return false;
        };
        match state.focus(goal) {
            Ok(focus) => {
                focus.frame_len() == 1
                    && matches!(focus.active().refine(&tactic), Ok(rest) if rest.is_empty())
            }
            Err(_) => false,
        }
    }

    fn goal_solved(&self, state: &ProofState, goal: &Goal) -> bool {
        state.goal_solved(goal)
    }

    fn transition(
        &self,
        state: &ProofState,
        action: &str,
        goal: &Goal,
    ) -> Result<(ProofState, bool), EnvError> {
        let tactic = self
            .primitive(action)
            .ok_or_else(|| EnvError::new(format!("not a primitive tactic: {action:?}")))?;
        state
            .apply_tactic(&tactic, goal)
            .map_err(|e| EnvError::new(e.to_string()))
    }

    fn check_proof(&self, task: &Task, actions: &[String]) -> bool {
        check_proof(task, actions)
    }

    fn render_state(&self, state: &ProofState) -> String {
        state.to_string()
    }

    fn render_goal(&self, goal: &Goal) -> String {
        goal.to_string()
    }
}
