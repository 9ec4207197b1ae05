//! Proof states of the propositional calculus and tactic semantics.
//!
//! A [`ProofState`] holds one [`Frame`] per materialised goal on the goal
//! stack. A frame owns the open sequents that together prove its goal;
//! `split` and `cases` grow the frame instead of the goal stack, so every
//! primitive tactic either progresses the top frame or empties it.
//!
//! A goal pushed by `have c : F` gets its frame lazily, on the first tactic
//! applied to it. Until then the state is untouched, and the pending goal's
//! sequent is the active sequent of the frame below with target `F`. When
//! a frame empties it is popped, and a `have` label becomes a hypothesis of
//! the sequent it was proposed from.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Formula;
use super::tactic::{is_binder_label, Tactic};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    pub label: String,
    pub formula: Formula,
}

impl Hypothesis {
    pub fn new(label: impl Into<String>, formula: Formula) -> Self {
        Hypothesis {
            label: label.into(),
            formula,
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub context: Vec<Hypothesis>,
    pub target: Formula,
}

impl Sequent {
    pub fn new(context: Vec<Hypothesis>, target: Formula) -> Self {
        Sequent { context, target }
    }

    pub fn lookup(&self, label: &str) -> Option<&Formula> {
        self.context
            .iter()
            .rev()
            .find(|h| h.label == label)
            .map(|h| &h.formula)
    }

    /// `label` is unused, and no projection `label.…` is in scope either.
    pub fn is_fresh(&self, label: &str) -> bool {
        self.context.iter().all(|h| {
            h.label != label
                && !(h.label.starts_with(label) && h.label[label.len()..].starts_with('.'))
        })
    }

    /// First fresh label among `base`, `base1`, `base2`, ...
    pub fn fresh_label(&self, base: &str) -> String {
        if self.is_fresh(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|l| self.is_fresh(l))
            .unwrap()
    }

    /// The target is literally one of the hypotheses.
    pub fn closed_by_assumption(&self) -> bool {
        self.context.iter().any(|h| h.formula == self.target)
    }

    fn with_target(&self, target: Formula) -> Sequent {
        Sequent {
            context: self.context.clone(),
            target,
        }
    }

    /// Sequents replacing `self` after a primitive tactic; empty when the
    /// tactic closes it.
    pub fn refine(&self, tactic: &Tactic) -> Result<Vec<Sequent>, TacticError> {
        let inapplicable = || TacticError::Inapplicable(tactic.to_string());
        let hyp = |label: &str| {
            self.lookup(label)
                .ok_or_else(|| TacticError::UnknownLabel(label.to_string()))
        };
        match tactic {
            Tactic::Exact(l) => {
                if *hyp(l)? == self.target {
                    Ok(Vec::new())
                } else {
                    Err(inapplicable())
                }
            }
            Tactic::Intro(l) => {
                let Formula::Implies(x, y) = &self.target else {
                    return Err(inapplicable());
                };
                if !is_binder_label(l) || !self.is_fresh(l) {
                    return Err(TacticError::LabelInUse(l.clone()));
                }
                let mut context = self.context.clone();
                context.push(Hypothesis::new(l.clone(), (**x).clone()));
                Ok(vec![Sequent::new(context, (**y).clone())])
            }
            Tactic::Apply(l) => match hyp(l)? {
                Formula::Implies(x, y) if **y == self.target => {
                    Ok(vec![self.with_target((**x).clone())])
                }
                _ => Err(inapplicable()),
            },
            Tactic::Split => match &self.target {
                Formula::And(x, y) => Ok(vec![
                    self.with_target((**x).clone()),
                    self.with_target((**y).clone()),
                ]),
                _ => Err(inapplicable()),
            },
            Tactic::Left | Tactic::Right => match &self.target {
                Formula::Or(x, y) => {
                    let side = if matches!(tactic, Tactic::Left) { x } else { y };
                    Ok(vec![self.with_target((**side).clone())])
                }
                _ => Err(inapplicable()),
            },
            Tactic::Cases(l) => match hyp(l)? {
                Formula::Or(x, y) => {
                    let branch = |f: &Formula| {
                        let context = self
                            .context
                            .iter()
                            .map(|h| {
                                if h.label == *l {
                                    Hypothesis::new(l.clone(), f.clone())
                                } else {
                                    h.clone()
                                }
                            })
                            .collect();
                        Sequent::new(context, self.target.clone())
                    };
                    Ok(vec![branch(x), branch(y)])
                }
                Formula::And(x, y) => {
                    let (l1, l2) = (format!("{l}.1"), format!("{l}.2"));
                    let mut context: Vec<Hypothesis> =
                        self.context.iter().filter(|h| h.label != *l).cloned().collect();
                    if context.iter().any(|h| h.label == l1 || h.label == l2) {
                        return Err(TacticError::LabelInUse(l1));
                    }
                    context.push(Hypothesis::new(l1, (**x).clone()));
                    context.push(Hypothesis::new(l2, (**y).clone()));
                    Ok(vec![Sequent::new(context, self.target.clone())])
                }
                _ => Err(inapplicable()),
            },
            Tactic::Have(..) => Err(TacticError::NotPrimitive),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.context.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.context.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "⊢ {}", self.target)
    }
}

/// A goal on the stack: the root theorem (no label) or a `have` conjecture.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Goal {
    pub label: Option<String>,
    pub statement: Formula,
}

impl Goal {
    pub fn root(statement: Formula) -> Self {
        Goal {
            label: None,
            statement,
        }
    }

    pub fn conjecture(label: impl Into<String>, statement: Formula) -> Self {
        Goal {
            label: Some(label.into()),
            statement,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l} : {}", self.statement),
            None => write!(f, "{}", self.statement),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub goal: Goal,
    /// Never empty; the first sequent is the active one.
    pub sequents: Vec<Sequent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProofState {
    frames: Vec<Frame>,
    closed: Vec<Goal>,
    history: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TacticError {
    #[error("not a tactic: {0:?}")]
    Malformed(String),
    #[error("tactic does not apply here: {0}")]
    Inapplicable(String),
    #[error("unknown hypothesis {0}")]
    UnknownLabel(String),
    #[error("label {0} is already in use")]
    LabelInUse(String),
    #[error("`have` is a goal proposal, not a primitive tactic")]
    NotPrimitive,
    #[error("no open goal")]
    NoOpenGoal,
    #[error("goal {0} is neither the top frame nor a pending conjecture")]
    UnknownGoal(String),
}

/// Where a tactic on `goal` acts.
pub(crate) enum Focus<'a> {
    /// The goal owns the top frame.
    Top(&'a Frame),
    /// A pending conjecture; its sequent does not exist yet.
    Pending(Sequent),
}

impl<'a> Focus<'a> {
    pub(crate) fn active(&self) -> &Sequent {
        match self {
            Focus::Top(frame) => &frame.sequents[0],
            Focus::Pending(seq) => seq,
        }
    }

    pub(crate) fn frame_len(&self) -> usize {
        match self {
            Focus::Top(frame) => frame.sequents.len(),
            Focus::Pending(_) => 1,
        }
    }
}

impl ProofState {
    pub fn new(hypotheses: Vec<Hypothesis>, target: Formula) -> Self {
        let frame = Frame {
            goal: Goal::root(target.clone()),
            sequents: vec![Sequent::new(hypotheses, target)],
        };
        ProofState {
            frames: vec![frame],
            closed: Vec::new(),
            history: Vec::new(),
        }
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Accepted tactic texts, in order. Replaying them from the initial
    /// state reproduces this state.
    pub fn history(&self) -> &[String] {
        &self.history
    }

    /// Goals whose frames have been discharged, in order of closing.
    pub fn closed(&self) -> &[Goal] {
        &self.closed
    }

    pub fn is_complete(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn open_sequent_count(&self) -> usize {
        self.frames.iter().map(|f| f.sequents.len()).sum()
    }

    pub(crate) fn top_frame(&self) -> Option<&Frame> {
        self.frames.last()
    }

    pub(crate) fn focus(&self, goal: &Goal) -> Result<Focus<'_>, TacticError> {
        let top = self.frames.last().ok_or(TacticError::NoOpenGoal)?;
        if top.goal == *goal {
            return Ok(Focus::Top(top));
        }
        if goal.label.is_none() {
            return Err(TacticError::UnknownGoal(goal.to_string()));
        }
        Ok(Focus::Pending(
            top.sequents[0].with_target(goal.statement.clone()),
        ))
    }

    /// Apply a primitive tactic to `goal`. Returns the new state and whether
    /// the goal was closed.
    pub fn apply_tactic(&self, tactic: &Tactic, goal: &Goal) -> Result<(ProofState, bool), TacticError> {
        let focus = self.focus(goal)?;
        let replacement = focus.active().refine(tactic)?;
        let mut next = self.clone();
        if let Focus::Pending(seq) = focus {
            let label = goal.label.as_deref().unwrap();
            next.history
                .push(Tactic::Have(label.to_string(), goal.statement.clone()).to_string());
            next.frames.push(Frame {
                goal: goal.clone(),
                sequents: vec![seq],
            });
        }
        next.history.push(tactic.to_string());
        let frame = next.frames.last_mut().unwrap();
        frame.sequents.splice(0..1, replacement);
        if !frame.sequents.is_empty() {
            return Ok((next, false));
        }
        let done = next.frames.pop().unwrap();
        if let (Some(label), Some(parent)) = (&done.goal.label, next.frames.last_mut()) {
            parent.sequents[0]
                .context
                .push(Hypothesis::new(label.clone(), done.goal.statement.clone()));
        }
        next.closed.push(done.goal);
        Ok((next, true))
    }

    /// Whether `goal` counts as solved: discharged already, or every
    /// sequent it still has is closed by an assumption.
    pub fn goal_solved(&self, goal: &Goal) -> bool {
        if let Some(frame) = self.frames.iter().rev().find(|f| f.goal == *goal) {
            return frame.sequents.iter().all(Sequent::closed_by_assumption);
        }
        if self.closed.contains(goal) {
            return true;
        }
        match self.focus(goal) {
            Ok(focus) => focus.active().closed_by_assumption(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.frames.is_empty() {
            return f.write_str("no goals");
        }
        for (i, frame) in self.frames.iter().enumerate() {
            if i > 0 {
                f.write_str(" ;; ")?;
            }
            write!(f, "[{}] ", frame.goal)?;
            for (j, s) in frame.sequents.iter().enumerate() {
                if j > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}
